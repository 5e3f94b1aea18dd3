#pragma once

#include <functional>
#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/random.hpp"

namespace bestofn {

// Per-agent behavior: a two-state loop per opinion. An agent explores its
// current option (duration set by the option's cost), then disseminates it
// (duration proportional to the measured quality), applies a decision rule to
// the opinions it heard, and starts over with the possibly new opinion.

enum class PhaseKind { exploration, dissemination };

struct Phase {
  PhaseKind kind = PhaseKind::exploration;
  OptionId option;
};

/// Sliding window over the most recently heard neighbor opinions. Inserting
/// into a full buffer evicts the oldest entry.
class OpinionBuffer {
 public:
  explicit OpinionBuffer(int capacity = 3) : capacity_(capacity) {}

  void record(OptionId opinion) {
    if (static_cast<int>(entries_.size()) == capacity_)
      entries_.erase(entries_.begin());
    entries_.push_back(opinion);
  }

  void clear() { entries_.clear(); }
  int capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<OptionId>& entries() const { return entries_; }

 private:
  int capacity_;
  std::vector<OptionId> entries_;
};

enum class RuleKind { voter, majority };

/// Voter: adopt the opinion of one uniformly chosen recent neighbor.
/// Majority: adopt the strict plurality of the recent neighbors (optionally
/// counting the own opinion once); ties keep the own opinion.
struct DecisionRule {
  RuleKind kind = RuleKind::voter;
  bool include_self = true;  // majority only
};

struct AgentState {
  int id = 0;
  Phase phase;
  double phase_ends_at = 0.0;
  double quality_estimate = 0.0;  // set on each exploration expiry
  OpinionBuffer buffer;
};

/// Scenario-specific replacement for the default Gaussian quality sampler.
using QualitySampler = std::function<double(OptionId, double now, RandomStream&)>;

/// Knobs shared by every agent of a swarm.
struct StrategyParams {
  double g = 10.0;      // dissemination gain: mean dissemination time of a quality-1 option
  double sigma = 0.0;   // stddev of quality measurement noise
  double q_min = 0.01;  // floor for quality estimates, keeps dissemination alive
  QualitySampler sampler;  // optional override for measure_quality
};

/// Draw the time spent assessing an option: exponential with mean cost.
double sample_exploration_duration(OptionId option, const ProblemInstance& instance,
                                   RandomStream& rng);

/// Draw the time spent advertising an opinion: exponential with mean
/// g * quality_estimate. Throws Error(degenerate_quality) when the estimate
/// is not positive.
double sample_dissemination_duration(double quality_estimate, double g, RandomStream& rng);

/// Noisy quality measurement: true quality at `now` plus N(0, sigma^2),
/// clamped to [q_min, 1].
double measure_quality(OptionId option, const ProblemInstance& instance, double sigma,
                       double q_min, double now, RandomStream& rng);

/// Voter rule. Empty buffer keeps the own opinion.
OptionId apply_voter(OptionId own, const OpinionBuffer& buffer, RandomStream& rng);

/// Majority rule: strict plurality of buffer (plus own once if include_self);
/// tie or empty buffer keeps the own opinion.
OptionId apply_majority(OptionId own, const OpinionBuffer& buffer, bool include_self);

OptionId apply_rule(const DecisionRule& rule, OptionId own, const OpinionBuffer& buffer,
                    RandomStream& rng);

/// Advance an agent whose phase has expired at `now`:
///   exploration -> measure quality, disseminate the same option;
///   dissemination -> apply the decision rule, clear the buffer, explore the
///   chosen option (re-exploring even when the opinion is unchanged).
/// Throws Error(phase_not_expired) when now < phase_ends_at.
AgentState step_agent(AgentState agent, double now, const DecisionRule& rule,
                      const ProblemInstance& instance, const StrategyParams& params,
                      RandomStream& rng);

}  // namespace bestofn
