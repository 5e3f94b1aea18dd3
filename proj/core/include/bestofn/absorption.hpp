#pragma once

#include <cstddef>
#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/simulator.hpp"

namespace bestofn {

// Exact absorption analysis of the finite-N opinion Markov chain (the same
// chain ssa_run samples from). States are count vectors over the 2n
// per-option compartments; the consensus classes (all N agents holding
// opinion i, in either phase) are absorbing. Exit probabilities and expected
// absorption times come from sparse linear solves over the transient states.

struct AbsorptionResult {
  std::vector<double> exit_probability;       // per option
  std::vector<double> conditional_mean_time;  // E[time | absorbed into option]
  double mean_absorption_time = 0.0;          // unconditional
  std::size_t num_states = 0;
};

/// Number of chain states for n options and N agents: C(N + 2n - 1, 2n - 1).
std::size_t ctmc_state_count(int n_options, int N);

/// Solves the absorption problem for the configured initial condition
/// (initial_opinions plus initial_phase; the stationary choice averages over
/// the per-opinion binomial phase split). Throws Error(state_space_too_large)
/// when the state count exceeds state_limit.
AbsorptionResult exact_absorption(const ProblemInstance& instance, const SwarmConfig& config,
                                  std::size_t state_limit = 200000);

}  // namespace bestofn
