#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "bestofn/strategy.hpp"

using namespace bestofn;

namespace {

OpinionBuffer buffer_of(int capacity, std::initializer_list<int> entries) {
  OpinionBuffer buffer(capacity);
  for (int index : entries) buffer.record({index});
  return buffer;
}

std::vector<int> entry_indices(const OpinionBuffer& buffer) {
  std::vector<int> out;
  for (OptionId id : buffer.entries()) out.push_back(id.index);
  return out;
}

}  // namespace

TEST_SUITE("strategy") {
  TEST_CASE("exploration duration is exponential with the option cost as mean") {
    const auto instance = make_instance({1, 1}, {2.0, 1.0});
    RandomStream rng(1001);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += sample_exploration_duration({1}, instance, rng);
    const double mean = sum / draws;
    CHECK(mean > 1.98);
    CHECK(mean < 2.02);
  }

  TEST_CASE("dissemination duration scales with gain and estimate") {
    // Inverse-CDF identity: u = e^{-1}, mean 10 -> exactly 10.
    CHECK(RandomStream::exponential_from_uniform(std::exp(-1.0), 10.0 * 1.0) ==
          doctest::Approx(10.0).epsilon(1e-12));

    RandomStream rng(77);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += sample_dissemination_duration(0.5, 10.0, rng);
    const double mean = sum / draws;
    CHECK(mean > 4.95);
    CHECK(mean < 5.05);
  }

  TEST_CASE("dissemination with a degenerate estimate is rejected") {
    RandomStream rng(1);
    try {
      sample_dissemination_duration(0.0, 10.0, rng);
      FAIL("zero estimate accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_quality);
    }
  }

  TEST_CASE("buffer keeps the newest G opinions in order") {
    auto buffer = buffer_of(3, {1, 2});
    buffer.record({2});
    CHECK(entry_indices(buffer) == std::vector<int>{1, 2, 2});
    buffer.record({1});  // evicts the oldest
    CHECK(entry_indices(buffer) == std::vector<int>{2, 2, 1});

    auto tiny = buffer_of(1, {2});
    tiny.record({1});
    CHECK(entry_indices(tiny) == std::vector<int>{1});
  }

  TEST_CASE("voter keeps own opinion with an empty buffer") {
    RandomStream rng(3);
    CHECK(apply_voter({1}, OpinionBuffer(3), rng).index == 1);
  }

  TEST_CASE("voter adopts the unanimous buffer opinion") {
    RandomStream rng(4);
    CHECK(apply_voter({1}, buffer_of(3, {2, 2, 2}), rng).index == 2);
  }

  TEST_CASE("voter picks uniformly among buffer entries") {
    RandomStream rng(5);
    const auto buffer = buffer_of(2, {1, 2});
    int adopted_two = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i)
      if (apply_voter({1}, buffer, rng).index == 2) ++adopted_two;
    const double frequency = static_cast<double>(adopted_two) / trials;
    CHECK(frequency > 0.49);
    CHECK(frequency < 0.51);
  }

  TEST_CASE("majority follows the plurality and keeps own on ties") {
    CHECK(apply_majority({2}, buffer_of(3, {1, 1, 2}), false).index == 1);
    CHECK(apply_majority({2}, buffer_of(2, {1, 2}), false).index == 2);
    // Tie after counting self: {1: 2, 2: 2} -> keep own.
    CHECK(apply_majority({1}, buffer_of(3, {2, 2, 1}), true).index == 1);
    CHECK(apply_majority({3}, OpinionBuffer(3), true).index == 3);
  }

  TEST_CASE("quality measurement is exact when noiseless and always clamped") {
    const auto instance = make_instance({1, 0.8}, {1, 1});
    RandomStream rng(6);
    CHECK(measure_quality({2}, instance, 0.0, 0.01, 0.0, rng) == doctest::Approx(0.8));
    for (int i = 0; i < 20000; ++i) {
      const double sample = measure_quality({2}, instance, 0.1, 0.01, 0.0, rng);
      CHECK(sample >= 0.01);
      CHECK(sample <= 1.0);
    }
  }

  TEST_CASE("step_agent transitions exploration to dissemination deterministically") {
    const auto instance = make_instance({1, 0.5}, {1, 1});
    RandomStream rng(8);
    AgentState agent;
    agent.phase = {PhaseKind::exploration, {1}};
    agent.phase_ends_at = 2.0;
    agent.buffer = OpinionBuffer(3);

    const auto next = step_agent(agent, 2.0, DecisionRule{}, instance, StrategyParams{}, rng);
    CHECK(next.phase.kind == PhaseKind::dissemination);
    CHECK(next.phase.option.index == 1);
    CHECK(next.quality_estimate == doctest::Approx(1.0));
    CHECK(next.phase_ends_at > 2.0);
  }

  TEST_CASE("step_agent applies the rule and clears the buffer on dissemination expiry") {
    const auto instance = make_instance({1, 1}, {1, 1});
    RandomStream rng(9);
    AgentState agent;
    agent.phase = {PhaseKind::dissemination, {1}};
    agent.phase_ends_at = 5.0;
    agent.quality_estimate = 1.0;
    agent.buffer = buffer_of(3, {2, 2, 2});

    const auto next = step_agent(agent, 5.0, DecisionRule{RuleKind::voter}, instance,
                                 StrategyParams{}, rng);
    CHECK(next.phase.kind == PhaseKind::exploration);
    CHECK(next.phase.option.index == 2);
    CHECK(next.buffer.empty());

    // Empty buffer keeps the opinion (and still re-explores it).
    AgentState isolated;
    isolated.phase = {PhaseKind::dissemination, {1}};
    isolated.phase_ends_at = 1.0;
    isolated.buffer = OpinionBuffer(3);
    const auto kept = step_agent(isolated, 1.0, DecisionRule{RuleKind::majority}, instance,
                                 StrategyParams{}, rng);
    CHECK(kept.phase.kind == PhaseKind::exploration);
    CHECK(kept.phase.option.index == 1);
  }

  TEST_CASE("step_agent refuses unexpired phases") {
    const auto instance = make_instance({1, 1}, {1, 1});
    RandomStream rng(10);
    AgentState agent;
    agent.phase = {PhaseKind::exploration, {1}};
    agent.phase_ends_at = 3.0;
    try {
      step_agent(agent, 2.5, DecisionRule{}, instance, StrategyParams{}, rng);
      FAIL("unexpired phase accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::phase_not_expired);
    }
  }

  TEST_CASE("phases strictly alternate and buffers are empty after decisions") {
    const auto instance = make_instance({1, 0.7}, {1.0, 2.0});
    RandomStream rng(119);
    StrategyParams params;
    AgentState agent;
    agent.phase = {PhaseKind::exploration, {1}};
    agent.phase_ends_at = 0.0;
    agent.buffer = OpinionBuffer(3);

    PhaseKind previous = agent.phase.kind;
    for (int step = 0; step < 2000; ++step) {
      const double now = agent.phase_ends_at;
      if (agent.phase.kind == PhaseKind::dissemination) {
        // Simulate hearing a few neighbors before the decision.
        const int heard = static_cast<int>(rng.uniform_below(4));
        for (int k = 0; k < heard; ++k)
          agent.buffer.record({static_cast<int>(rng.uniform_below(2)) + 1});
      }
      agent = step_agent(std::move(agent), now,
                         DecisionRule{step % 2 ? RuleKind::majority : RuleKind::voter},
                         instance, params, rng);
      CHECK(agent.phase.kind != previous);
      if (agent.phase.kind == PhaseKind::exploration) CHECK(agent.buffer.empty());
      CHECK(agent.phase_ends_at >= now);
      previous = agent.phase.kind;
    }
  }

  TEST_CASE("decision rules are closed over own opinion plus buffer entries") {
    RandomStream rng(2048);
    for (int trial = 0; trial < 2000; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_below(3));
      const OptionId own{static_cast<int>(rng.uniform_below(n)) + 1};
      OpinionBuffer buffer(3);
      const int fill = static_cast<int>(rng.uniform_below(4));
      std::vector<int> allowed{own.index};
      for (int k = 0; k < fill; ++k) {
        const int entry = static_cast<int>(rng.uniform_below(n)) + 1;
        buffer.record({entry});
        allowed.push_back(entry);
      }
      const int voted = apply_voter(own, buffer, rng).index;
      const int majored = apply_majority(own, buffer, trial % 2 == 0).index;
      CHECK(std::count(allowed.begin(), allowed.end(), voted) > 0);
      CHECK(std::count(allowed.begin(), allowed.end(), majored) > 0);
    }
  }

  TEST_CASE("relabeling options commutes with both decision rules") {
    RandomStream rng(4096);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3;
      std::vector<int> perm{1, 2, 3};
      for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_below(i + 1)]);

      const OptionId own{static_cast<int>(rng.uniform_below(n)) + 1};
      OpinionBuffer buffer(4), relabeled(4);
      const int fill = static_cast<int>(rng.uniform_below(5));
      for (int k = 0; k < fill; ++k) {
        const int entry = static_cast<int>(rng.uniform_below(n)) + 1;
        buffer.record({entry});
        relabeled.record({perm[entry - 1]});
      }
      const OptionId mapped_own{perm[own.index - 1]};

      // Voter with the same seed picks the same buffer slot.
      RandomStream voter_a(trial), voter_b(trial);
      CHECK(perm[apply_voter(own, buffer, voter_a).index - 1] ==
            apply_voter(mapped_own, relabeled, voter_b).index);
      CHECK(perm[apply_majority(own, buffer, true).index - 1] ==
            apply_majority(mapped_own, relabeled, true).index);
    }
  }
}
