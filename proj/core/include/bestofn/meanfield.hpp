#pragma once

#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/simulator.hpp"
#include "bestofn/strategy.hpp"

namespace bestofn {

// Predictive models of the swarm dynamics. All of them assume buffer entries
// are i.i.d. draws from the current disseminator opinion distribution (the
// simulator's with_replacement flag reproduces exactly that), and use true
// option qualities clamped to [q_min, 1] in place of noisy estimates.
//
// Compartments per option i: e_i (exploring) and d_i (disseminating).
// With p_k = d_k / sum(d) and w[j] the decision-rule output distribution of
// an agent holding opinion j, the flows are
//   d e_i/dt = sum_j d_j / (g q_j) * w[j][i]  -  e_i / c_i
//   d d_i/dt = e_i / c_i  -  d_i / (g q_i)
// i.e. rates are the reciprocals of the mean exponential phase durations.

/// Population fractions per compartment; total mass 1.
struct MeanFieldState {
  std::vector<double> exploring;
  std::vector<double> disseminating;

  double mass() const;
  /// e_i + d_i: the fraction of the swarm holding opinion i.
  double opinion_fraction(std::size_t option_offset) const;
};

struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
};

/// Output distribution of a decision rule for an agent with opinion `own`
/// whose G buffer entries are i.i.d. draws from p. Voter: p itself. Majority:
/// exact enumeration over all buffer compositions with multinomial weights.
std::vector<double> decision_outcome_distribution(const DecisionRule& rule, OptionId own,
                                                  const std::vector<double>& p, int G);

/// Time derivative of the mean-field state; conserves total mass exactly.
MeanFieldState ode_rhs(const MeanFieldState& state, const ProblemInstance& instance,
                       double g, const DecisionRule& rule, int G, double q_min);

/// Classical 4th-order fixed-step integration, sampled every dt. Throws
/// Error(tolerance_exceeded) if mass conservation or non-negativity drifts
/// beyond 1e-6 (dt too large).
MeanFieldTrajectory integrate(const ProblemInstance& instance, double g,
                              const DecisionRule& rule, int G, const MeanFieldState& y0,
                              double horizon, double dt, double q_min = 0.01);

/// Mean-field initial state from a swarm config: opinion fractions from
/// initial_opinions, phases per the configured initial phase.
MeanFieldState initial_state(const SwarmConfig& config, const ProblemInstance& instance);

/// Exact stochastic simulation of the finite-N Markov chain whose rates
/// mirror ode_rhs. Same contract as simulator run(): consensus detection with
/// tau, max_time cutoff, bit-identical output for identical seeds.
RunRecord ssa_run(const ProblemInstance& instance, const SwarmConfig& config,
                  RandomStream& rng);
RunRecord ssa_run(const ProblemInstance& instance, const SwarmConfig& config);

}  // namespace bestofn
