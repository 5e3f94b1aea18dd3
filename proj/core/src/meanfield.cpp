#include "bestofn/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bestofn {

namespace {

double effective_quality(const ProblemInstance& instance, int offset, double q_min) {
  return std::clamp(instance.options[offset].quality, q_min, 1.0);
}

/// Walks every composition (k_1..k_n) of G and invokes visit(counts, weight)
/// with the multinomial probability weight of that buffer composition.
void for_each_composition(const std::vector<double>& p, int G,
                          const std::function<void(const std::vector<int>&, double)>& visit) {
  const int n = static_cast<int>(p.size());
  std::vector<int> counts(n, 0);
  // weight carried along the recursion: multinomial coefficient times
  // product of p_i^{k_i}.
  auto recurse = [&](auto&& self, int option, int remaining, double weight) -> void {
    if (option == n - 1) {
      counts[option] = remaining;
      visit(counts, weight * std::pow(p[option], remaining));
      return;
    }
    double binom = 1.0;  // C(remaining, k) built incrementally
    double p_pow = 1.0;
    for (int k = 0; k <= remaining; ++k) {
      counts[option] = k;
      self(self, option + 1, remaining - k, weight * binom * p_pow);
      binom = binom * (remaining - k) / (k + 1);
      p_pow *= p[option];
    }
  };
  recurse(recurse, 0, G, 1.0);
}

/// Majority over a counted buffer: strict plurality, ties keep own.
int majority_winner(const std::vector<int>& buffer_counts, int own_offset,
                    bool include_self) {
  int best = 0, winner = own_offset;
  bool unique = false;
  for (std::size_t i = 0; i < buffer_counts.size(); ++i) {
    const int count = buffer_counts[i] +
                      (include_self && static_cast<int>(i) == own_offset ? 1 : 0);
    if (count > best) {
      best = count;
      winner = static_cast<int>(i);
      unique = true;
    } else if (count == best) {
      unique = false;
    }
  }
  return unique ? winner : own_offset;
}

}  // namespace

double MeanFieldState::mass() const {
  return std::accumulate(exploring.begin(), exploring.end(), 0.0) +
         std::accumulate(disseminating.begin(), disseminating.end(), 0.0);
}

double MeanFieldState::opinion_fraction(std::size_t option_offset) const {
  return exploring[option_offset] + disseminating[option_offset];
}

std::vector<double> decision_outcome_distribution(const DecisionRule& rule, OptionId own,
                                                  const std::vector<double>& p, int G) {
  if (rule.kind == RuleKind::voter) return p;
  std::vector<double> out(p.size(), 0.0);
  const int own_offset = static_cast<int>(own.offset());
  for_each_composition(p, G, [&](const std::vector<int>& counts, double weight) {
    out[majority_winner(counts, own_offset, rule.include_self)] += weight;
  });
  return out;
}

MeanFieldState ode_rhs(const MeanFieldState& state, const ProblemInstance& instance,
                       double g, const DecisionRule& rule, int G, double q_min) {
  const int n = instance.n();
  MeanFieldState rhs;
  rhs.exploring.assign(n, 0.0);
  rhs.disseminating.assign(n, 0.0);

  double sum_d = 0.0;
  for (double d : state.disseminating) sum_d += std::max(d, 0.0);

  std::vector<std::vector<double>> w;  // per source opinion
  std::vector<double> p(n, 0.0);
  if (sum_d > 0.0) {
    for (int i = 0; i < n; ++i) p[i] = std::max(state.disseminating[i], 0.0) / sum_d;
    w.reserve(n);
    for (int j = 0; j < n; ++j)
      w.push_back(decision_outcome_distribution(rule, OptionId{j + 1}, p, G));
  }

  for (int i = 0; i < n; ++i) {
    const double explore_out = state.exploring[i] / instance.options[i].cost;
    const double dissem_out =
        state.disseminating[i] / (g * effective_quality(instance, i, q_min));
    rhs.exploring[i] -= explore_out;
    rhs.disseminating[i] += explore_out - dissem_out;
  }
  if (sum_d > 0.0) {
    for (int j = 0; j < n; ++j) {
      const double deciders =
          state.disseminating[j] / (g * effective_quality(instance, j, q_min));
      for (int i = 0; i < n; ++i) rhs.exploring[i] += deciders * w[j][i];
    }
  } else {
    // No disseminators: nobody decides, dissemination outflow is zero.
    for (int i = 0; i < n; ++i) {
      const double dissem_out =
          state.disseminating[i] / (g * effective_quality(instance, i, q_min));
      rhs.disseminating[i] += dissem_out;
    }
  }
  return rhs;
}

namespace {

MeanFieldState axpy(const MeanFieldState& y, const MeanFieldState& k, double factor) {
  MeanFieldState out = y;
  for (std::size_t i = 0; i < out.exploring.size(); ++i) {
    out.exploring[i] += factor * k.exploring[i];
    out.disseminating[i] += factor * k.disseminating[i];
  }
  return out;
}

void check_state(const MeanFieldState& state, double t) {
  double lowest = 0.0;
  for (double v : state.exploring) lowest = std::min(lowest, v);
  for (double v : state.disseminating) lowest = std::min(lowest, v);
  if (std::abs(state.mass() - 1.0) > 1e-6 || lowest < -1e-6)
    throw Error(Errc::tolerance_exceeded,
                "state invariants drifted beyond 1e-6 at t=" + std::to_string(t) +
                    "; reduce dt");
}

}  // namespace

MeanFieldTrajectory integrate(const ProblemInstance& instance, double g,
                              const DecisionRule& rule, int G, const MeanFieldState& y0,
                              double horizon, double dt, double q_min) {
  if (!(dt > 0.0)) throw Error(Errc::validation_error, "dt must be > 0");
  if (!(horizon >= 0.0)) throw Error(Errc::validation_error, "horizon must be >= 0");
  if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
  if (static_cast<int>(y0.exploring.size()) != instance.n() ||
      static_cast<int>(y0.disseminating.size()) != instance.n())
    throw Error(Errc::validation_error, "y0 must have one compartment pair per option");
  check_state(y0, 0.0);

  auto f = [&](const MeanFieldState& y) { return ode_rhs(y, instance, g, rule, G, q_min); };

  MeanFieldTrajectory trajectory;
  MeanFieldState y = y0;
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  trajectory.times.push_back(0.0);
  trajectory.states.push_back(y);
  for (long step = 1; step <= steps; ++step) {
    const MeanFieldState k1 = f(y);
    const MeanFieldState k2 = f(axpy(y, k1, dt / 2.0));
    const MeanFieldState k3 = f(axpy(y, k2, dt / 2.0));
    const MeanFieldState k4 = f(axpy(y, k3, dt));
    for (std::size_t i = 0; i < y.exploring.size(); ++i) {
      y.exploring[i] += dt / 6.0 *
          (k1.exploring[i] + 2.0 * k2.exploring[i] + 2.0 * k3.exploring[i] + k4.exploring[i]);
      y.disseminating[i] += dt / 6.0 *
          (k1.disseminating[i] + 2.0 * k2.disseminating[i] + 2.0 * k3.disseminating[i] +
           k4.disseminating[i]);
    }
    const double t = static_cast<double>(step) * dt;
    check_state(y, t);
    trajectory.times.push_back(t);
    trajectory.states.push_back(y);
  }
  return trajectory;
}

MeanFieldState initial_state(const SwarmConfig& config, const ProblemInstance& instance) {
  const int n = instance.n();
  MeanFieldState y0;
  y0.exploring.assign(n, 0.0);
  y0.disseminating.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double fraction = config.initial_opinions[i];
    if (config.initial_phase == InitialPhase::stationary) {
      const double mean_d = config.g * effective_quality(instance, i, config.q_min);
      const double p_dissem = mean_d / (instance.options[i].cost + mean_d);
      y0.exploring[i] = fraction * (1.0 - p_dissem);
      y0.disseminating[i] = fraction * p_dissem;
    } else {
      y0.exploring[i] = fraction;
    }
  }
  return y0;
}

RunRecord ssa_run(const ProblemInstance& instance, const SwarmConfig& config,
                  RandomStream& rng) {
  if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
  if (auto bad = validate_config(config, instance.n())) throw Error(bad->code, bad->message);

  const int N = config.N;
  const int n = instance.n();

  std::vector<int> exploring(n, 0), disseminating(n, 0);
  {
    const auto counts = allocate_opinions(config.initial_opinions, N);
    for (int i = 0; i < n; ++i) {
      if (config.initial_phase == InitialPhase::stationary) {
        const double mean_d = config.g * effective_quality(instance, i, config.q_min);
        const double p_dissem = mean_d / (instance.options[i].cost + mean_d);
        for (int k = 0; k < counts[i]; ++k)
          (rng.bernoulli(p_dissem) ? disseminating[i] : exploring[i]) += 1;
      } else {
        exploring[i] = counts[i];
      }
    }
  }

  RunRecord record;
  record.seed = config.seed;

  auto opinion_count = [&](int i) { return exploring[i] + disseminating[i]; };
  const bool sampling = config.sample_interval > 0.0;
  double next_sample = 0.0;
  auto take_sample = [&](double at) {
    record.trajectory.push_back({at, exploring, disseminating});
  };

  std::vector<int> counts(n);
  auto consensus = [&]() {
    for (int i = 0; i < n; ++i) counts[i] = opinion_count(i);
    return detect_consensus(counts, config.tau, N);
  };

  if (auto winner = consensus()) {
    if (sampling) take_sample(0.0);
    record.decided = true;
    record.winner = winner;
    record.decision_time = 0.0;
    return record;
  }

  std::vector<double> explore_rate(n), decide_rate(n), p(n);
  double t = 0.0;
  bool decided = false;
  double end_time = config.max_time;

  while (true) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      explore_rate[i] = exploring[i] / instance.options[i].cost;
      decide_rate[i] =
          disseminating[i] / (config.g * effective_quality(instance, i, config.q_min));
      total += explore_rate[i] + decide_rate[i];
    }
    if (total <= 0.0) break;  // frozen state (cannot happen with N >= 1)

    t += rng.exponential(1.0 / total);
    if (t > config.max_time) break;

    if (sampling) {
      while (next_sample < t) {
        take_sample(next_sample);
        next_sample += config.sample_interval;
      }
    }
    ++record.events;

    double pick = rng.uniform01() * total;
    int event_option = -1;
    bool is_exploration_end = false;
    for (int i = 0; i < n; ++i) {
      if (pick < explore_rate[i]) {
        event_option = i;
        is_exploration_end = true;
        break;
      }
      pick -= explore_rate[i];
      if (pick < decide_rate[i]) {
        event_option = i;
        break;
      }
      pick -= decide_rate[i];
    }
    if (event_option < 0) event_option = n - 1;  // guard fp rounding at the tail

    if (is_exploration_end) {
      --exploring[event_option];
      ++disseminating[event_option];
      continue;
    }

    // A disseminating agent of opinion j decides; its buffer is i.i.d. from
    // the current disseminator distribution (the decider still counts).
    double sum_d = 0.0;
    for (int i = 0; i < n; ++i) sum_d += disseminating[i];
    for (int i = 0; i < n; ++i) p[i] = disseminating[i] / sum_d;
    const auto w =
        decision_outcome_distribution(config.rule, OptionId{event_option + 1}, p, config.G);

    double u = rng.uniform01();
    int next_opinion = n - 1;
    for (int i = 0; i < n; ++i) {
      if (u < w[i]) {
        next_opinion = i;
        break;
      }
      u -= w[i];
    }

    --disseminating[event_option];
    ++exploring[next_opinion];
    if (next_opinion != event_option) {
      if (auto winner = consensus()) {
        decided = true;
        record.winner = winner;
        end_time = t;
      }
    }
    if (decided) break;
  }

  if (sampling) {
    while (next_sample <= end_time + 1e-12) {
      take_sample(next_sample);
      next_sample += config.sample_interval;
    }
  }
  record.decided = decided;
  record.decision_time = decided ? end_time : config.max_time;
  return record;
}

RunRecord ssa_run(const ProblemInstance& instance, const SwarmConfig& config) {
  RandomStream rng(config.seed);
  return ssa_run(instance, config, rng);
}

}  // namespace bestofn
