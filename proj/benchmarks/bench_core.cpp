#include "benchmark/benchmark.h"

#include "bestofn/absorption.hpp"
#include "bestofn/meanfield.hpp"
#include "bestofn/simulator.hpp"

using namespace bestofn;

namespace {

SwarmConfig config_for(int N) {
  SwarmConfig config;
  config.N = N;
  config.initial_opinions = {0.5, 0.5};
  config.seed = 12345;
  return config;
}

const ProblemInstance& biased_instance() {
  static const ProblemInstance instance = make_instance({1.0, 0.5}, {1.0, 1.0});
  return instance;
}

}  // namespace

static void BM_AgentRun(benchmark::State& state) {
  auto config = config_for(static_cast<int>(state.range(0)));
  long events = 0;
  for (auto _ : state) {
    config.seed += 1;
    const auto record = run(config, biased_instance());
    events += record.events;
    benchmark::DoNotOptimize(record.decision_time);
  }
  state.SetItemsProcessed(events);
}
BENCHMARK(BM_AgentRun)->Arg(50)->Arg(100)->Arg(400);

static void BM_SsaRun(benchmark::State& state) {
  auto config = config_for(static_cast<int>(state.range(0)));
  long events = 0;
  for (auto _ : state) {
    config.seed += 1;
    const auto record = ssa_run(biased_instance(), config);
    events += record.events;
    benchmark::DoNotOptimize(record.decision_time);
  }
  state.SetItemsProcessed(events);
}
BENCHMARK(BM_SsaRun)->Arg(50)->Arg(100)->Arg(1000);

static void BM_MajorityOutcomeDistribution(benchmark::State& state) {
  const int G = static_cast<int>(state.range(0));
  const std::vector<double> p{0.35, 0.4, 0.25};
  const DecisionRule rule{RuleKind::majority};
  for (auto _ : state) {
    const auto out = decision_outcome_distribution(rule, {1}, p, G);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_MajorityOutcomeDistribution)->Arg(3)->Arg(7)->Arg(11);

static void BM_MeanFieldIntegrate(benchmark::State& state) {
  MeanFieldState y0;
  y0.exploring = {0.5, 0.5};
  y0.disseminating = {0.0, 0.0};
  for (auto _ : state) {
    const auto trajectory =
        integrate(biased_instance(), 10.0, DecisionRule{}, 3, y0, 100.0, 0.01);
    benchmark::DoNotOptimize(trajectory.states.back().mass());
  }
}
BENCHMARK(BM_MeanFieldIntegrate);

static void BM_ExactAbsorption(benchmark::State& state) {
  const auto config = config_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto result = exact_absorption(biased_instance(), config);
    benchmark::DoNotOptimize(result.exit_probability.data());
  }
  state.SetLabel(std::to_string(ctmc_state_count(2, static_cast<int>(state.range(0)))) +
                 " states");
}
BENCHMARK(BM_ExactAbsorption)->Arg(10)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
