#include "bestofn/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numeric>
#include <queue>
#include <thread>

#include "bestofn/meanfield.hpp"

namespace bestofn {

namespace {

int consensus_threshold(double tau, int N) {
  // Smallest integer k with k >= tau * N, robust to tau*N landing a hair
  // above an integer in floating point.
  return static_cast<int>(std::ceil(tau * static_cast<double>(N) - 1e-9));
}

struct Event {
  double time;
  int agent;
  bool operator>(const Event& other) const {
    if (time != other.time) return time > other.time;
    return agent > other.agent;
  }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, std::greater<Event>>;

// Current disseminators with O(1) insert/remove and uniform indexing.
class DisseminatorSet {
 public:
  explicit DisseminatorSet(int N) : position_(N, -1) {}

  void insert(int agent) {
    position_[agent] = static_cast<int>(members_.size());
    members_.push_back(agent);
  }

  void remove(int agent) {
    const int pos = position_[agent];
    const int last = members_.back();
    members_[pos] = last;
    position_[last] = pos;
    members_.pop_back();
    position_[agent] = -1;
  }

  int size() const { return static_cast<int>(members_.size()); }
  int at(int pos) const { return members_[pos]; }
  const std::vector<int>& members() const { return members_; }

 private:
  std::vector<int> members_;
  std::vector<int> position_;
};

}  // namespace

std::optional<Violation> validate_config(const SwarmConfig& config, int n_options) {
  if (config.N < 2) return Violation{Errc::validation_error, "N must be >= 2"};
  if (!(config.g > 0.0)) return Violation{Errc::validation_error, "g must be > 0"};
  if (config.G < 1) return Violation{Errc::validation_error, "G must be >= 1"};
  if (config.sigma < 0.0) return Violation{Errc::validation_error, "sigma must be >= 0"};
  if (!(config.q_min > 0.0) || config.q_min >= 1.0)
    return Violation{Errc::validation_error, "qMin must lie in (0, 1)"};
  if (!(config.tau > 0.5) || config.tau > 1.0)
    return Violation{Errc::validation_error, "tau must lie in (0.5, 1]"};
  if (!(config.max_time > 0.0))
    return Violation{Errc::validation_error, "maxTime must be > 0"};
  if (config.sample_interval < 0.0)
    return Violation{Errc::validation_error, "sampleInterval must be >= 0"};
  if (static_cast<int>(config.initial_opinions.size()) != n_options)
    return Violation{Errc::validation_error,
                     "initialOpinions must have one fraction per option"};
  double sum = 0.0;
  for (double f : config.initial_opinions) {
    if (f < 0.0)
      return Violation{Errc::validation_error, "initialOpinions must be >= 0"};
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    return Violation{Errc::validation_error, "initialOpinions must sum to 1"};
  return std::nullopt;
}

std::optional<OptionId> detect_consensus(const std::vector<int>& counts, double tau, int N) {
  const int threshold = consensus_threshold(tau, N);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] >= threshold) return OptionId{static_cast<int>(i) + 1};
  return std::nullopt;
}

std::vector<int> allocate_opinions(const std::vector<double>& fractions, int N) {
  const int n = static_cast<int>(fractions.size());
  std::vector<int> counts(n);
  std::vector<std::pair<double, int>> remainders;  // (-remainder, index): stable order
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double exact = fractions[i] * N;
    counts[i] = static_cast<int>(std::floor(exact + 1e-9));
    assigned += counts[i];
    remainders.push_back({-(exact - counts[i]), i});
  }
  std::sort(remainders.begin(), remainders.end());
  for (int k = 0; k < N - assigned; ++k) ++counts[remainders[k % n].second];
  return counts;
}

RunRecord run(const SwarmConfig& config, const ProblemInstance& instance,
              const QualitySampler& sampler) {
  if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
  if (auto bad = validate_config(config, instance.n())) throw Error(bad->code, bad->message);

  const int N = config.N;
  const int n = instance.n();
  RandomStream rng(config.seed);
  StrategyParams params{config.g, config.sigma, config.q_min, sampler};

  std::vector<AgentState> agents(N);
  std::vector<int> opinion_counts(n, 0);
  DisseminatorSet disseminators(N);
  EventQueue queue;

  // Opinion layout from the configured fractions; agent order is irrelevant
  // under well mixing.
  {
    const auto counts = allocate_opinions(config.initial_opinions, N);
    int agent = 0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < counts[i]; ++k) agents[agent++].phase.option = {i + 1};
    opinion_counts = counts;
  }

  for (int id = 0; id < N; ++id) {
    AgentState& agent = agents[id];
    agent.id = id;
    agent.buffer = OpinionBuffer(config.G);
    const OptionId opinion = agent.phase.option;
    bool disseminating = false;
    if (config.initial_phase == InitialPhase::stationary) {
      const double q_eff = std::clamp(instance.quality(opinion), config.q_min, 1.0);
      const double mean_d = config.g * q_eff;
      const double p_dissem = mean_d / (instance.cost(opinion) + mean_d);
      disseminating = rng.bernoulli(p_dissem);
    }
    if (disseminating) {
      agent.quality_estimate =
          sampler ? std::clamp(sampler(opinion, 0.0, rng), config.q_min, 1.0)
                  : measure_quality(opinion, instance, config.sigma, config.q_min, 0.0, rng);
      agent.phase = {PhaseKind::dissemination, opinion};
      // Residual dissemination time is a fresh exponential (memoryless).
      agent.phase_ends_at = sample_dissemination_duration(agent.quality_estimate,
                                                          config.g, rng);
      disseminators.insert(id);
    } else {
      agent.phase = {PhaseKind::exploration, opinion};
      agent.phase_ends_at = sample_exploration_duration(opinion, instance, rng);
    }
    queue.push({agent.phase_ends_at, id});
  }

  RunRecord record;
  record.seed = config.seed;

  const bool sampling = config.sample_interval > 0.0;
  double next_sample = 0.0;
  auto take_sample = [&](double at) {
    TrajectorySample sample;
    sample.time = at;
    sample.exploring.assign(n, 0);
    sample.disseminating.assign(n, 0);
    for (const AgentState& agent : agents) {
      auto& side = agent.phase.kind == PhaseKind::exploration ? sample.exploring
                                                              : sample.disseminating;
      ++side[agent.phase.option.offset()];
    }
    record.trajectory.push_back(std::move(sample));
  };

  // An initial consensus counts as an immediate decision.
  if (auto winner = detect_consensus(opinion_counts, config.tau, N)) {
    if (sampling) take_sample(0.0);
    record.decided = true;
    record.winner = winner;
    record.decision_time = 0.0;
    return record;
  }

  std::vector<OptionId> scratch;  // neighbor opinions for one buffer fill
  double end_time = config.max_time;
  bool decided = false;

  while (true) {
    const Event event = queue.top();
    if (event.time > config.max_time) break;
    queue.pop();

    if (sampling) {
      while (next_sample < event.time) {
        take_sample(next_sample);
        next_sample += config.sample_interval;
      }
    }

    AgentState& agent = agents[event.agent];
    assert(agent.phase_ends_at == event.time);
    ++record.events;

    if (agent.phase.kind == PhaseKind::dissemination) {
      // Fill the buffer from the well-mixed dissemination pool, then decide.
      if (config.with_replacement) {
        for (int k = 0; k < config.G; ++k) {
          const int heard = disseminators.at(
              static_cast<int>(rng.uniform_below(disseminators.size())));
          agent.buffer.record(agents[heard].phase.option);
        }
        disseminators.remove(event.agent);
      } else {
        disseminators.remove(event.agent);
        const int others = disseminators.size();
        const int draws = std::min(config.G, others);
        scratch.clear();
        for (int member : disseminators.members())
          scratch.push_back(agents[member].phase.option);
        for (int k = 0; k < draws; ++k) {
          const int pick = k + static_cast<int>(rng.uniform_below(others - k));
          std::swap(scratch[k], scratch[pick]);
          agent.buffer.record(scratch[k]);
        }
      }

      const OptionId before = agent.phase.option;
      agents[event.agent] = step_agent(std::move(agents[event.agent]), event.time,
                                       config.rule, instance, params, rng);
      const OptionId after = agents[event.agent].phase.option;
      if (after != before) {
        --opinion_counts[before.offset()];
        ++opinion_counts[after.offset()];
        if (auto winner = detect_consensus(opinion_counts, config.tau, N)) {
          decided = true;
          record.winner = winner;
          end_time = event.time;
        }
      }
    } else {
      agents[event.agent] = step_agent(std::move(agents[event.agent]), event.time,
                                       config.rule, instance, params, rng);
      disseminators.insert(event.agent);
    }

    queue.push({agents[event.agent].phase_ends_at, event.agent});
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

BatchMetrics batch(Engine engine, const SwarmConfig& config, const ProblemInstance& instance,
                   int repetitions, std::uint64_t seed_base, const QualitySampler& sampler,
                   int threads) {
  if (repetitions < 1)
    throw Error(Errc::validation_error, "repetitions must be >= 1");
  if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
  if (auto bad = validate_config(config, instance.n())) throw Error(bad->code, bad->message);

  const int n = instance.n();
  std::vector<RunSummary> summaries(repetitions);

  auto execute_run = [&](int index) {
    SwarmConfig local = config;
    local.seed = seed_base + static_cast<std::uint64_t>(index);
    local.sample_interval = 0.0;  // batches aggregate outcomes, not trajectories
    const RunRecord record = engine == Engine::agent ? run(local, instance, sampler)
                                                     : ssa_run(instance, local);
    summaries[index] = {local.seed, record.decided,
                        record.winner.value_or(OptionId{0}), record.decision_time};
  };

  int worker_count = threads > 0 ? threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::clamp(worker_count, 1, repetitions);
  if (worker_count == 1) {
    for (int i = 0; i < repetitions; ++i) execute_run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w)
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < repetitions; i = next.fetch_add(1))
          execute_run(i);
      });
    for (auto& worker : workers) worker.join();
  }

  BatchMetrics metrics;
  metrics.repetitions = repetitions;
  metrics.wins.assign(n, 0);
  double time_sum = 0.0, time_sq_sum = 0.0;
  for (const RunSummary& summary : summaries) {
    if (summary.decided) {
      ++metrics.decided;
      ++metrics.wins[summary.winner.offset()];
      time_sum += summary.decision_time;
      time_sq_sum += summary.decision_time * summary.decision_time;
    }
  }
  metrics.exit_probability.assign(n, 0.0);
  metrics.exit_stderr.assign(n, 0.0);
  if (metrics.decided > 0) {
    for (int i = 0; i < n; ++i) {
      const double p = static_cast<double>(metrics.wins[i]) / metrics.decided;
      metrics.exit_probability[i] = p;
      metrics.exit_stderr[i] = std::sqrt(p * (1.0 - p) / metrics.decided);
    }
    metrics.mean_decision_time = time_sum / metrics.decided;
    if (metrics.decided > 1) {
      const double var = (time_sq_sum - time_sum * time_sum / metrics.decided) /
                         (metrics.decided - 1);
      metrics.decision_time_sd = std::sqrt(std::max(0.0, var));
      metrics.decision_time_stderr = metrics.decision_time_sd / std::sqrt(metrics.decided);
    }
  }
  metrics.non_decision_rate =
      1.0 - static_cast<double>(metrics.decided) / repetitions;
  metrics.runs = std::move(summaries);
  return metrics;
}

}  // namespace bestofn
