#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/strategy.hpp"

namespace bestofn {

// Event-driven execution of N agents under the exploration/dissemination
// strategy in a well-mixed interaction model: any disseminating agent is
// equally likely to be heard by a deciding one. Exponential phase durations
// make event-driven execution exact (no timestep discretization).

enum class InitialPhase {
  exploring,   // every agent starts a fresh exploration of its opinion
  stationary,  // phases assigned per the per-opinion stationary split
};

struct SwarmConfig {
  int N = 100;                           // population size, >= 2
  double g = 10.0;                       // dissemination gain, > 0
  int G = 3;                             // opinion buffer capacity, >= 1
  double sigma = 0.0;                    // quality measurement noise, >= 0
  double q_min = 0.01;                   // quality estimate floor, in (0, 1)
  DecisionRule rule;                     // voter or majority
  std::vector<double> initial_opinions;  // fraction per option, sums to 1
  double tau = 1.0;                      // consensus threshold, in (0.5, 1]
  double max_time = 1e5;                 // give up after this much model time
  std::uint64_t seed = 1;
  // When set, a deciding agent fills its buffer with G independent draws from
  // all current disseminators (itself included) instead of min(G, D-1)
  // distinct other disseminators. This makes the agent process match the
  // analytical models' i.i.d. buffer assumption exactly.
  bool with_replacement = false;
  InitialPhase initial_phase = InitialPhase::exploring;
  double sample_interval = 0.0;  // trajectory sampling grid; 0 disables
};

/// Opinion counts split by phase at one sample time. Counts always sum to N.
struct TrajectorySample {
  double time = 0.0;
  std::vector<int> exploring;      // per option
  std::vector<int> disseminating;  // per option
};

struct RunRecord {
  std::uint64_t seed = 0;
  bool decided = false;
  std::optional<OptionId> winner;
  double decision_time = 0.0;  // max_time when undecided
  long events = 0;
  std::vector<TrajectorySample> trajectory;
};

struct RunSummary {
  std::uint64_t seed = 0;
  bool decided = false;
  OptionId winner{0};  // index 0 when undecided
  double decision_time = 0.0;
};

struct BatchMetrics {
  int repetitions = 0;
  int decided = 0;
  std::vector<long> wins;                // per option, among decided runs
  std::vector<double> exit_probability;  // wins / decided
  std::vector<double> exit_stderr;       // binomial standard error
  double non_decision_rate = 0.0;
  double mean_decision_time = 0.0;       // over decided runs
  double decision_time_sd = 0.0;
  double decision_time_stderr = 0.0;
  std::vector<RunSummary> runs;          // in seed order
};

enum class Engine { agent, ssa };

/// Checks SwarmConfig invariants against an instance with n options.
std::optional<Violation> validate_config(const SwarmConfig& config, int n_options);

/// The option held by at least ceil(tau * N) agents, if any. tau in (0.5, 1]
/// guarantees uniqueness; tau = 1 is strict consensus.
std::optional<OptionId> detect_consensus(const std::vector<int>& counts, double tau, int N);

/// Deterministic allocation of N agents to options from the configured
/// fractions (largest-remainder rounding).
std::vector<int> allocate_opinions(const std::vector<double>& fractions, int N);

/// One full simulation: runs until >= ceil(tau*N) agents share an opinion
/// (decided) or max_time elapses. Identical config and instance give a
/// bit-identical record.
RunRecord run(const SwarmConfig& config, const ProblemInstance& instance,
              const QualitySampler& sampler = {});

/// R independent runs with seeds seed_base .. seed_base+R-1, aggregated into
/// exit probabilities, decision-time statistics and standard errors. Runs
/// execute in parallel; results are merged in seed order, so the outcome does
/// not depend on the thread count.
BatchMetrics batch(Engine engine, const SwarmConfig& config, const ProblemInstance& instance,
                   int repetitions, std::uint64_t seed_base,
                   const QualitySampler& sampler = {}, int threads = 0);

}  // namespace bestofn
