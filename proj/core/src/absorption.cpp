#include "bestofn/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "bestofn/meanfield.hpp"

namespace bestofn {

namespace {

// A state is a vector of 2n counts: (E_1..E_n, D_1..D_n), summing to N.
using State = std::vector<int>;

std::uint64_t pack(const State& state, int base) {
  std::uint64_t key = 0;
  for (int count : state) key = key * static_cast<std::uint64_t>(base) + count;
  return key;
}

void enumerate_states(State& partial, int compartment, int remaining,
                      std::vector<State>& out) {
  const int last = static_cast<int>(partial.size()) - 1;
  if (compartment == last) {
    partial[last] = remaining;
    out.push_back(partial);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    partial[compartment] = k;
    enumerate_states(partial, compartment + 1, remaining - k, out);
  }
}

double effective_quality(const ProblemInstance& instance, int offset, double q_min) {
  return std::clamp(instance.options[offset].quality, q_min, 1.0);
}

/// Option the state is a consensus for, or -1 if it is transient.
int consensus_class(const State& state, int n, int N) {
  for (int i = 0; i < n; ++i)
    if (state[i] + state[n + i] == N) return i;
  return -1;
}

double binomial_pmf(int k, int m, double prob) {
  double coefficient = 1.0;
  for (int j = 0; j < k; ++j) coefficient = coefficient * (m - j) / (j + 1);
  return coefficient * std::pow(prob, k) * std::pow(1.0 - prob, m - k);
}

}  // namespace

std::size_t ctmc_state_count(int n_options, int N) {
  // C(N + 2n - 1, 2n - 1), computed in floating point with a cap to avoid
  // overflow for absurd inputs.
  const int k = 2 * n_options - 1;
  double count = 1.0;
  for (int j = 1; j <= k; ++j) {
    count = count * (N + j) / j;
    if (count > 1e18) return static_cast<std::size_t>(1e18);
  }
  return static_cast<std::size_t>(std::llround(count));
}

AbsorptionResult exact_absorption(const ProblemInstance& instance, const SwarmConfig& config,
                                  std::size_t state_limit) {
  if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
  if (auto bad = validate_config(config, instance.n())) throw Error(bad->code, bad->message);

  const int n = instance.n();
  const int N = config.N;
  const std::size_t total_states = ctmc_state_count(n, N);
  if (total_states > state_limit)
    throw Error(Errc::state_space_too_large,
                std::to_string(total_states) + " states exceed the limit of " +
                    std::to_string(state_limit));

  std::vector<State> states;
  states.reserve(total_states);
  {
    State partial(2 * n, 0);
    enumerate_states(partial, 0, N, states);
  }
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(states.size() * 2);
  for (std::size_t s = 0; s < states.size(); ++s)
    index.emplace(pack(states[s], N + 1), static_cast<int>(s));

  // Split transient states from the n absorbing consensus classes.
  std::vector<int> transient_index(states.size(), -1);
  std::vector<int> absorbed_class(states.size(), -1);
  int num_transient = 0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    absorbed_class[s] = consensus_class(states[s], n, N);
    if (absorbed_class[s] < 0) transient_index[s] = num_transient++;
  }

  // Assemble A = diag(total rate) - Q restricted to transient states, and the
  // inflow vectors b_i into each consensus class.
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  std::vector<Eigen::VectorXd> class_inflow(n, Eigen::VectorXd::Zero(num_transient));
  std::vector<double> p(n);

  for (std::size_t s = 0; s < states.size(); ++s) {
    const int row = transient_index[s];
    if (row < 0) continue;
    const State& state = states[s];
    double total_rate = 0.0;

    auto add_transition = [&](State next, double rate) {
      total_rate += rate;
      const int t = index.at(pack(next, N + 1));
      if (transient_index[t] >= 0)
        triplets.push_back({row, transient_index[t], -rate});
      else
        class_inflow[absorbed_class[t]](row) += rate;
    };

    // Exploration ends: E_i -> D_i at rate E_i / c_i.
    for (int i = 0; i < n; ++i) {
      if (state[i] == 0) continue;
      State next = state;
      --next[i];
      ++next[n + i];
      add_transition(std::move(next), state[i] / instance.options[i].cost);
    }

    // Dissemination ends: a deciding agent of opinion j moves to exploring
    // option i with probability w[j][i].
    double sum_d = 0.0;
    for (int i = 0; i < n; ++i) sum_d += state[n + i];
    if (sum_d > 0.0) {
      for (int i = 0; i < n; ++i) p[i] = state[n + i] / sum_d;
      for (int j = 0; j < n; ++j) {
        if (state[n + j] == 0) continue;
        const double exit_rate =
            state[n + j] / (config.g * effective_quality(instance, j, config.q_min));
        const auto w =
            decision_outcome_distribution(config.rule, OptionId{j + 1}, p, config.G);
        for (int i = 0; i < n; ++i) {
          if (w[i] <= 0.0) continue;
          State next = state;
          --next[n + j];
          ++next[i];
          add_transition(std::move(next), exit_rate * w[i]);
        }
      }
    }

    triplets.push_back({row, row, total_rate});
  }

  Eigen::SparseMatrix<double> A(num_transient, num_transient);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::validation_error, "absorption linear system factorization failed");

  // Absorption probabilities x_i, unconditional times T, and the conditional
  // accumulators u_i with A u_i = x_i.
  std::vector<Eigen::VectorXd> x(n);
  for (int i = 0; i < n; ++i) x[i] = solver.solve(class_inflow[i]);
  Eigen::VectorXd T = solver.solve(Eigen::VectorXd::Ones(num_transient));
  std::vector<Eigen::VectorXd> u(n);
  for (int i = 0; i < n; ++i) u[i] = solver.solve(x[i]);

  // Initial distribution over states.
  std::vector<std::pair<int, double>> initial;  // (state index, probability)
  const auto opinion_counts = allocate_opinions(config.initial_opinions, N);
  if (config.initial_phase == InitialPhase::exploring) {
    State start(2 * n, 0);
    for (int i = 0; i < n; ++i) start[i] = opinion_counts[i];
    initial.push_back({index.at(pack(start, N + 1)), 1.0});
  } else {
    // Independent binomial phase split per opinion group.
    std::vector<double> p_dissem(n);
    for (int i = 0; i < n; ++i) {
      const double mean_d = config.g * effective_quality(instance, i, config.q_min);
      p_dissem[i] = mean_d / (instance.options[i].cost + mean_d);
    }
    std::vector<std::pair<State, double>> partials{{State(2 * n, 0), 1.0}};
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<State, double>> expanded;
      for (const auto& [state, prob] : partials) {
        for (int k = 0; k <= opinion_counts[i]; ++k) {
          State next = state;
          next[i] = opinion_counts[i] - k;
          next[n + i] = k;
          expanded.push_back({std::move(next),
                              prob * binomial_pmf(k, opinion_counts[i], p_dissem[i])});
        }
      }
      partials = std::move(expanded);
    }
    for (auto& [state, prob] : partials)
      initial.push_back({index.at(pack(state, N + 1)), prob});
  }

  AbsorptionResult result;
  result.num_states = states.size();
  result.exit_probability.assign(n, 0.0);
  result.conditional_mean_time.assign(n, 0.0);
  std::vector<double> time_mass(n, 0.0);
  for (const auto& [s, prob] : initial) {
    const int row = transient_index[s];
    if (row >= 0) {
      for (int i = 0; i < n; ++i) {
        result.exit_probability[i] += prob * x[i](row);
        time_mass[i] += prob * u[i](row);
      }
      result.mean_absorption_time += prob * T(row);
    } else {
      // Already a consensus state: absorbed at time zero.
      result.exit_probability[absorbed_class[s]] += prob;
    }
  }
  for (int i = 0; i < n; ++i)
    result.conditional_mean_time[i] =
        result.exit_probability[i] > 1e-300 ? time_mass[i] / result.exit_probability[i] : 0.0;
  return result;
}

}  // namespace bestofn
