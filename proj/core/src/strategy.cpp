#include "bestofn/strategy.hpp"

#include <algorithm>
#include <map>

namespace bestofn {

double sample_exploration_duration(OptionId option, const ProblemInstance& instance,
                                   RandomStream& rng) {
  return rng.exponential(instance.cost(option));
}

double sample_dissemination_duration(double quality_estimate, double g, RandomStream& rng) {
  if (!(quality_estimate > 0.0))
    throw Error(Errc::degenerate_quality,
                "quality estimate must be > 0; floor estimates at q_min");
  return rng.exponential(g * quality_estimate);
}

double measure_quality(OptionId option, const ProblemInstance& instance, double sigma,
                       double q_min, double now, RandomStream& rng) {
  double value = instance.quality_at(option, now);
  if (sigma > 0.0) value += rng.normal(0.0, sigma);
  return std::clamp(value, q_min, 1.0);
}

OptionId apply_voter(OptionId own, const OpinionBuffer& buffer, RandomStream& rng) {
  if (buffer.empty()) return own;
  return buffer.entries()[rng.uniform_below(buffer.size())];
}

OptionId apply_majority(OptionId own, const OpinionBuffer& buffer, bool include_self) {
  if (buffer.empty()) return own;
  std::map<OptionId, int> counts;
  for (OptionId opinion : buffer.entries()) ++counts[opinion];
  if (include_self) ++counts[own];

  OptionId leader = own;
  int best = 0;
  bool unique = false;
  for (const auto& [opinion, count] : counts) {
    if (count > best) {
      best = count;
      leader = opinion;
      unique = true;
    } else if (count == best) {
      unique = false;
    }
  }
  return unique ? leader : own;
}

OptionId apply_rule(const DecisionRule& rule, OptionId own, const OpinionBuffer& buffer,
                    RandomStream& rng) {
  switch (rule.kind) {
    case RuleKind::voter: return apply_voter(own, buffer, rng);
    case RuleKind::majority: return apply_majority(own, buffer, rule.include_self);
  }
  return own;
}

AgentState step_agent(AgentState agent, double now, const DecisionRule& rule,
                      const ProblemInstance& instance, const StrategyParams& params,
                      RandomStream& rng) {
  if (now < agent.phase_ends_at)
    throw Error(Errc::phase_not_expired, "agent phase has not expired yet");

  if (agent.phase.kind == PhaseKind::exploration) {
    const OptionId option = agent.phase.option;
    agent.quality_estimate =
        params.sampler ? std::clamp(params.sampler(option, now, rng), params.q_min, 1.0)
                       : measure_quality(option, instance, params.sigma, params.q_min, now, rng);
    agent.phase = {PhaseKind::dissemination, option};
    agent.phase_ends_at = now + sample_dissemination_duration(agent.quality_estimate,
                                                              params.g, rng);
  } else {
    const OptionId next = apply_rule(rule, agent.phase.option, agent.buffer, rng);
    agent.buffer.clear();
    agent.phase = {PhaseKind::exploration, next};
    agent.phase_ends_at = now + sample_exploration_duration(next, instance, rng);
  }
  return agent;
}

}  // namespace bestofn
