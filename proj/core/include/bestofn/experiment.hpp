#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/scenarios.hpp"
#include "bestofn/simulator.hpp"

namespace bestofn {

// Experiment harness behind the command line tool: JSON experiment specs in,
// CSV tables and a self-describing summary.json out. Parsing is strict
// (unknown keys are errors) and all outputs are byte-identical for identical
// spec + seed.

enum class Command { simulate, ssa, meanfield, absorb, sweep };

struct SweepAxis {
  std::string parameter;        // a SwarmConfig field or q_<i> / c_<i>
  std::vector<double> values;
};

struct ExperimentSpec {
  std::optional<Command> command;  // may instead be given on the command line
  ProblemInstance instance;
  std::string scenario_type;       // empty for inline instances
  std::optional<PerceptionScenario> perception;  // sampler override source
  SwarmConfig config;
  int repetitions = 100;
  std::optional<SweepAxis> sweep;
  std::string output_dir = ".";
  double horizon = 100.0;          // meanfield integration window
  double dt = 0.01;                // meanfield integration step
  std::size_t state_limit = 200000;
};

/// Command-line overrides applied on top of a loaded spec.
struct RunOverrides {
  std::optional<Command> command;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> repetitions;
  bool quiet = false;
};

Command command_from_name(const std::string& name);
std::string_view command_name(Command command) noexcept;

/// Parses and fully validates an experiment spec; defaults applied, unknown
/// keys rejected. Relative scenario/instance paths resolve against base_dir.
ExperimentSpec parse_spec(const std::string& json_text, const std::string& base_dir = ".");
ExperimentSpec load_spec(const std::string& path);

/// Runs the experiment and writes its output files (runs.csv,
/// trajectory.csv, absorption.csv, sweep.csv, summary.json as applicable)
/// into the output directory. Returns 0 on success; failures throw Error.
int execute(const ExperimentSpec& spec, const RunOverrides& overrides = {});

inline constexpr std::string_view kArtifactVersion = "0.1.0";

}  // namespace bestofn
