#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "bestofn/meanfield.hpp"

using namespace bestofn;

namespace {

/// Independent oracle: distribution of the majority output by enumerating all
/// n^G ordered buffers and applying the actual apply_majority function.
std::vector<double> brute_force_majority(OptionId own, const std::vector<double>& p, int G,
                                         bool include_self) {
  const int n = static_cast<int>(p.size());
  std::vector<double> out(n, 0.0);
  std::vector<int> tuple(G, 0);
  while (true) {
    OpinionBuffer buffer(G);
    double weight = 1.0;
    for (int slot = 0; slot < G; ++slot) {
      buffer.record({tuple[slot] + 1});
      weight *= p[tuple[slot]];
    }
    out[apply_majority(own, buffer, include_self).offset()] += weight;

    int slot = G - 1;
    while (slot >= 0 && tuple[slot] == n - 1) tuple[slot--] = 0;
    if (slot < 0) break;
    ++tuple[slot];
  }
  return out;
}

MeanFieldState state_of(std::vector<double> e, std::vector<double> d) {
  return MeanFieldState{std::move(e), std::move(d)};
}

}  // namespace

TEST_SUITE("meanfield") {
  TEST_CASE("voter outcome distribution is the buffer distribution itself") {
    const std::vector<double> p{0.3, 0.7};
    for (int G : {1, 3, 7})
      CHECK(decision_outcome_distribution(DecisionRule{RuleKind::voter}, {1}, p, G) == p);
  }

  TEST_CASE("majority with a balanced pool is a coin flip for G = 3") {
    const auto out = decision_outcome_distribution(
        DecisionRule{RuleKind::majority, false}, {1}, {0.5, 0.5}, 3);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("majority in a unanimous environment keeps that option") {
    const auto out = decision_outcome_distribution(
        DecisionRule{RuleKind::majority, false}, {1}, {1.0, 0.0}, 3);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.0));
  }

  TEST_CASE("majority distribution matches brute-force enumeration") {
    RandomStream rng(606);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_below(2));
      const int G = 1 + static_cast<int>(rng.uniform_below(4));
      std::vector<double> p(n);
      double sum = 0.0;
      for (double& v : p) sum += v = 0.01 + rng.uniform01();
      for (double& v : p) v /= sum;
      for (bool include_self : {false, true}) {
        for (int own = 1; own <= n; ++own) {
          const DecisionRule rule{RuleKind::majority, include_self};
          const auto fast = decision_outcome_distribution(rule, {own}, p, G);
          const auto slow = brute_force_majority({own}, p, G, include_self);
          REQUIRE(fast.size() == slow.size());
          for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("outcome distributions are probability vectors") {
    RandomStream rng(607);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_below(3));
      const int G = 1 + static_cast<int>(rng.uniform_below(5));
      std::vector<double> p(n);
      double sum = 0.0;
      for (double& v : p) sum += v = rng.uniform01();
      for (double& v : p) v /= sum;
      const DecisionRule rule{trial % 2 ? RuleKind::majority : RuleKind::voter,
                              trial % 4 < 2};
      const auto out = decision_outcome_distribution(rule, {1}, p, G);
      double total = 0.0;
      for (double v : out) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }

  TEST_CASE("ode conserves mass at random states") {
    const auto instance = make_instance({1, 0.5}, {1, 2}, Interaction::antagonistic);
    RandomStream rng(608);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> raw(4);
      double sum = 0.0;
      for (double& v : raw) sum += v = rng.uniform01();
      for (double& v : raw) v /= sum;
      const auto state = state_of({raw[0], raw[1]}, {raw[2], raw[3]});
      const DecisionRule rule{trial % 2 ? RuleKind::majority : RuleKind::voter};
      const auto rhs = ode_rhs(state, instance, 10.0, rule, 3, 0.01);
      const double drift = std::accumulate(rhs.exploring.begin(), rhs.exploring.end(), 0.0) +
                           std::accumulate(rhs.disseminating.begin(),
                                           rhs.disseminating.end(), 0.0);
      CHECK(std::abs(drift) < 1e-14);
    }
  }

  TEST_CASE("consensus states feed no mass to the losing option") {
    const auto instance = make_instance({1, 1}, {1, 1});
    const auto state = state_of({0.3, 0.0}, {0.7, 0.0});
    const auto rhs = ode_rhs(state, instance, 10.0, DecisionRule{}, 3, 0.01);
    CHECK(rhs.exploring[1] == 0.0);
    CHECK(rhs.disseminating[1] == 0.0);
  }

  TEST_CASE("phase-balanced consensus is a fixed point") {
    const auto instance = make_instance({1, 0.5}, {2, 1}, Interaction::antagonistic);
    // e/c = d/(g q) balances the two phases of option 1.
    const double c = 2.0, gq = 10.0 * 1.0;
    const double e = c / (c + gq), d = gq / (c + gq);
    const auto rhs = ode_rhs(state_of({e, 0.0}, {d, 0.0}), instance, 10.0,
                             DecisionRule{RuleKind::majority}, 3, 0.01);
    for (double v : rhs.exploring) CHECK(std::abs(v) < 1e-15);
    for (double v : rhs.disseminating) CHECK(std::abs(v) < 1e-15);
  }

  TEST_CASE("symmetric states stay symmetric under the flow") {
    const auto instance = make_instance({1, 1}, {1, 1});
    const auto y0 = state_of({0.5, 0.5}, {0.0, 0.0});
    const auto trajectory = integrate(instance, 10.0, DecisionRule{}, 3, y0, 50.0, 0.01);
    for (const auto& state : trajectory.states) {
      CHECK(state.opinion_fraction(0) == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(state.opinion_fraction(1) == doctest::Approx(0.5).epsilon(1e-9));
    }
  }

  TEST_CASE("consensus starts keep a constant opinion split") {
    const auto instance = make_instance({1, 0.5}, {1, 1});
    const auto y0 = state_of({1.0, 0.0}, {0.0, 0.0});
    const auto trajectory = integrate(instance, 10.0, DecisionRule{}, 3, y0, 30.0, 0.01);
    for (const auto& state : trajectory.states)
      CHECK(state.opinion_fraction(0) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("quality advantage grows monotonically in the mean field") {
    const auto instance = make_instance({1, 0.5}, {1, 1});
    const auto y0 = state_of({0.5, 0.5}, {0.0, 0.0});
    const auto trajectory = integrate(instance, 10.0, DecisionRule{}, 3, y0, 100.0, 0.01);
    // After the initial phase transient the advantaged fraction rises.
    double previous = -1.0;
    bool increasing = true;
    for (std::size_t k = 200; k < trajectory.states.size(); k += 100) {
      const double fraction = trajectory.states[k].opinion_fraction(0);
      if (fraction <= previous) increasing = false;
      previous = fraction;
    }
    CHECK(increasing);
    CHECK(trajectory.states.back().opinion_fraction(0) > 0.9);
  }

  TEST_CASE("oversized steps trip the conservation watchdog") {
    const auto instance = make_instance({1, 1}, {1, 1});
    const auto y0 = state_of({1.0, 0.0}, {0.0, 0.0});
    CHECK_THROWS_AS(integrate(instance, 10.0, DecisionRule{}, 3, y0, 2000.0, 40.0), Error);
  }

  TEST_CASE("ssa decides immediately from a consensus start") {
    const auto instance = make_instance({1, 1}, {1, 1});
    SwarmConfig config;
    config.N = 2;
    config.initial_opinions = {1.0, 0.0};
    const auto record = ssa_run(instance, config);
    CHECK(record.decided);
    CHECK(record.winner->index == 1);
    CHECK(record.decision_time == 0.0);
  }

  TEST_CASE("ssa splits symmetric swarms evenly") {
    const auto instance = make_instance({1, 1}, {1, 1});
    SwarmConfig config;
    config.N = 50;
    config.initial_opinions = {0.5, 0.5};
    const int R = 2000;
    const auto metrics = batch(Engine::ssa, config, instance, R, 81000);
    REQUIRE(metrics.decided == R);
    CHECK(std::abs(metrics.exit_probability[0] - 0.5) < 3.0 * std::sqrt(0.25 / R));
  }

  TEST_CASE("ssa runs are reproducible") {
    const auto instance = make_instance({1, 0.5}, {1, 1});
    SwarmConfig config;
    config.N = 30;
    config.initial_opinions = {0.5, 0.5};
    config.seed = 99;
    config.sample_interval = 5.0;
    const auto a = ssa_run(instance, config);
    const auto b = ssa_run(instance, config);
    CHECK(a.decision_time == b.decision_time);
    CHECK(a.events == b.events);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i)
      CHECK(a.trajectory[i].disseminating == b.trajectory[i].disseminating);
  }

  TEST_CASE("ssa mean trajectory tracks the integrated mean field") {
    const auto instance = make_instance({1, 0.5}, {1, 1});
    SwarmConfig config;
    config.N = 10000;
    config.initial_opinions = {0.5, 0.5};
    config.sample_interval = 2.0;
    config.max_time = 20.0 + 1e-9;
    config.tau = 1.0;

    const int R = 5;
    const int samples = 11;  // t = 0, 2, ..., 20
    std::vector<double> mean_fraction(samples, 0.0);
    for (int rep = 0; rep < R; ++rep) {
      auto local = config;
      local.seed = 300 + rep;
      const auto record = ssa_run(instance, local);
      REQUIRE(record.trajectory.size() >= static_cast<std::size_t>(samples));
      for (int k = 0; k < samples; ++k) {
        const auto& sample = record.trajectory[k];
        mean_fraction[k] +=
            static_cast<double>(sample.exploring[0] + sample.disseminating[0]) / config.N;
      }
    }
    for (double& v : mean_fraction) v /= R;

    const auto y0 = state_of({0.5, 0.5}, {0.0, 0.0});
    const auto ode = integrate(instance, config.g, config.rule, config.G, y0, 20.0, 0.01);
    for (int k = 0; k < samples; ++k) {
      const auto ode_index = static_cast<std::size_t>(std::llround(2.0 * k / 0.01));
      const double ode_fraction = ode.states[ode_index].opinion_fraction(0);
      CHECK(std::abs(mean_fraction[k] - ode_fraction) < 0.02);
    }
  }
}
