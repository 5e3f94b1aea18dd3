// Command line entry point. An experiment is described by a JSON spec file;
// the command (simulate, ssa, meanfield, absorb, sweep) comes from the spec
// or from the positional argument, which takes precedence.

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bestofn/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"best-of-n collective decision experiments"};

  std::string command;
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int repetitions = 0;
  bool quiet = false;

  app.add_option("command", command,
                 "simulate | ssa | meanfield | absorb | sweep (overrides the spec file)");
  app.add_option("--spec", spec_path, "experiment spec JSON file")->required();
  app.add_option("--out", out_dir, "output directory (default: spec's output, else .)");
  auto* seed_opt = app.add_option("--seed", seed, "override the spec's base seed");
  auto* reps_opt =
      app.add_option("--repetitions", repetitions, "override the spec's repetition count");
  app.add_flag("--quiet", quiet, "suppress the one-line result summary");

  CLI11_PARSE(app, argc, argv);

  try {
    bestofn::ExperimentSpec spec = bestofn::load_spec(spec_path);
    bestofn::RunOverrides overrides;
    if (!command.empty()) overrides.command = bestofn::command_from_name(command);
    if (!out_dir.empty()) overrides.output_dir = out_dir;
    if (seed_opt->count() > 0) overrides.seed = seed;
    if (reps_opt->count() > 0) overrides.repetitions = repetitions;
    overrides.quiet = quiet;
    return bestofn::execute(spec, overrides);
  } catch (const bestofn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
