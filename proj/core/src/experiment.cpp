#include "bestofn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bestofn/absorption.hpp"
#include "bestofn/meanfield.hpp"

namespace bestofn {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

/// Shortest round-trip decimal representation; deterministic across runs.
std::string fmt(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string fmt(std::uint64_t value) { return std::to_string(value); }
std::string fmt(int value) { return std::to_string(value); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(Errc::io_error, "cannot write " + path.string());
    write_row(header);
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> formatted;
    (formatted.push_back(to_cell(cells)), ...);
    write_row(formatted);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  static std::string to_cell(const std::string& s) { return s; }
  template <typename T>
  static std::string to_cell(const T& v) { return fmt(v); }

  std::ofstream out_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RuleKind rule_from_name(const std::string& name) {
  if (name == "voter") return RuleKind::voter;
  if (name == "majority") return RuleKind::majority;
  throw Error(Errc::validation_error, "rule must be \"voter\" or \"majority\"");
}

InitialPhase phase_from_name(const std::string& name) {
  if (name == "explore") return InitialPhase::exploring;
  if (name == "stationary") return InitialPhase::stationary;
  throw Error(Errc::validation_error, "initialPhase must be \"explore\" or \"stationary\"");
}

void apply_sweep_value(const std::string& parameter, double value, SwarmConfig& config,
                       ProblemInstance& instance) {
  auto as_int = [&](const char* what) {
    if (value != std::floor(value))
      throw Error(Errc::validation_error, std::string(what) + " sweep values must be integers");
    return static_cast<int>(value);
  };
  if (parameter == "N") config.N = as_int("N");
  else if (parameter == "g") config.g = value;
  else if (parameter == "G") config.G = as_int("G");
  else if (parameter == "sigma") config.sigma = value;
  else if (parameter == "qMin") config.q_min = value;
  else if (parameter == "tau") config.tau = value;
  else if (parameter == "maxTime") config.max_time = value;
  else if (parameter.rfind("q_", 0) == 0 || parameter.rfind("c_", 0) == 0) {
    int option = 0;
    const auto digits = parameter.substr(2);
    const auto result =
        std::from_chars(digits.data(), digits.data() + digits.size(), option);
    if (result.ec != std::errc{} || option < 1 || option > instance.n())
      throw Error(Errc::validation_error, "sweep parameter \"" + parameter +
                                              "\" does not name an option");
    if (parameter[0] == 'q') instance.options[option - 1].quality = value;
    else instance.options[option - 1].cost = value;
  } else {
    throw Error(Errc::validation_error,
                "sweep parameter \"" + parameter + "\" is not a config or instance field");
  }
}

ordered_json instance_json(const ProblemInstance& instance) {
  ordered_json out;
  out["n"] = instance.n();
  std::vector<double> quality, cost;
  for (const auto& option : instance.options) {
    quality.push_back(option.quality);
    cost.push_back(option.cost);
  }
  out["quality"] = quality;
  out["cost"] = cost;
  out["interaction"] = std::string(interaction_name(instance.interaction));
  return out;
}

ordered_json config_json(const ExperimentSpec& spec) {
  const SwarmConfig& config = spec.config;
  ordered_json out;
  out["N"] = config.N;
  out["g"] = config.g;
  out["G"] = config.G;
  out["sigma"] = config.sigma;
  out["qMin"] = config.q_min;
  out["rule"] = config.rule.kind == RuleKind::voter ? "voter" : "majority";
  out["includeSelf"] = config.rule.include_self;
  out["initialOpinions"] = config.initial_opinions;
  out["tau"] = config.tau;
  out["maxTime"] = config.max_time;
  out["seed"] = config.seed;
  out["withReplacement"] = config.with_replacement;
  out["initialPhase"] =
      config.initial_phase == InitialPhase::exploring ? "explore" : "stationary";
  out["sampleInterval"] = config.sample_interval;
  out["repetitions"] = spec.repetitions;
  if (spec.command == Command::meanfield) {
    out["horizon"] = spec.horizon;
    out["dt"] = spec.dt;
  }
  if (spec.command == Command::absorb) out["stateLimit"] = spec.state_limit;
  return out;
}

ordered_json batch_json(const BatchMetrics& metrics) {
  ordered_json out;
  out["repetitions"] = metrics.repetitions;
  out["decided"] = metrics.decided;
  out["nonDecisionRate"] = metrics.non_decision_rate;
  out["wins"] = metrics.wins;
  out["exitProbability"] = metrics.exit_probability;
  out["exitStdError"] = metrics.exit_stderr;
  out["meanDecisionTime"] = metrics.mean_decision_time;
  out["decisionTimeSd"] = metrics.decision_time_sd;
  out["decisionTimeStdError"] = metrics.decision_time_stderr;
  return out;
}

void write_summary(const fs::path& dir, const ExperimentSpec& spec, ordered_json results) {
  ordered_json summary;
  summary["artifact"] = {{"name", "bestofn"}, {"version", std::string(kArtifactVersion)}};
  summary["command"] = std::string(command_name(*spec.command));
  summary["seed"] = spec.config.seed;
  summary["config"] = config_json(spec);
  summary["instance"] = instance_json(spec.instance);
  if (!spec.scenario_type.empty()) summary["scenario"] = spec.scenario_type;
  summary["results"] = std::move(results);
  std::ofstream out(dir / "summary.json");
  if (!out) throw Error(Errc::io_error, "cannot write " + (dir / "summary.json").string());
  out << summary.dump(2) << '\n';
}

void write_runs_csv(const fs::path& dir, const BatchMetrics& metrics) {
  CsvWriter csv(dir / "runs.csv", {"seed", "decided", "winner", "decision_time"});
  for (const RunSummary& run : metrics.runs)
    csv.row(run.seed, run.decided ? 1 : 0, run.winner.index, run.decision_time);
}

void write_trajectory_csv(const fs::path& dir, const RunRecord& record, int n) {
  std::vector<std::string> header{"time"};
  for (int i = 1; i <= n; ++i) header.push_back("E_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("D_" + std::to_string(i));
  CsvWriter csv(dir / "trajectory.csv", header);
  for (const TrajectorySample& sample : record.trajectory) {
    std::vector<std::string> row{fmt(sample.time)};
    for (int count : sample.exploring) row.push_back(fmt(count));
    for (int count : sample.disseminating) row.push_back(fmt(count));
    csv.write_row(row);
  }
}

QualitySampler make_sampler(const ExperimentSpec& spec) {
  if (spec.perception) return make_perception_sampler(*spec.perception, spec.config.q_min);
  return {};
}

int run_batch_command(const ExperimentSpec& spec, const fs::path& dir, bool quiet) {
  const Engine engine = *spec.command == Command::simulate ? Engine::agent : Engine::ssa;
  const auto sampler = make_sampler(spec);
  const BatchMetrics metrics = batch(engine, spec.config, spec.instance, spec.repetitions,
                                     spec.config.seed, sampler);
  write_runs_csv(dir, metrics);
  if (spec.config.sample_interval > 0.0) {
    // Trajectory of the first run of the batch.
    const RunRecord record = engine == Engine::agent ? run(spec.config, spec.instance, sampler)
                                                     : ssa_run(spec.instance, spec.config);
    write_trajectory_csv(dir, record, spec.instance.n());
  }
  write_summary(dir, spec, batch_json(metrics));
  if (!quiet) {
    std::ostringstream line;
    line << command_name(*spec.command) << ": " << metrics.decided << "/"
         << metrics.repetitions << " decided";
    if (metrics.decided > 0) {
      line << ", exit probability [";
      for (std::size_t i = 0; i < metrics.exit_probability.size(); ++i)
        line << (i ? " " : "") << fmt(metrics.exit_probability[i]);
      line << "], mean decision time " << fmt(metrics.mean_decision_time);
    }
    std::puts(line.str().c_str());
  }
  return 0;
}

int run_meanfield_command(const ExperimentSpec& spec, const fs::path& dir, bool quiet) {
  const int n = spec.instance.n();
  const MeanFieldState y0 = initial_state(spec.config, spec.instance);
  const MeanFieldTrajectory trajectory =
      integrate(spec.instance, spec.config.g, spec.config.rule, spec.config.G, y0,
                spec.horizon, spec.dt, spec.config.q_min);

  std::vector<std::string> header{"time"};
  for (int i = 1; i <= n; ++i) header.push_back("e_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("d_" + std::to_string(i));
  CsvWriter csv(dir / "trajectory.csv", header);
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    std::vector<std::string> row{fmt(trajectory.times[k])};
    for (double e : trajectory.states[k].exploring) row.push_back(fmt(e));
    for (double d : trajectory.states[k].disseminating) row.push_back(fmt(d));
    csv.write_row(row);
  }

  const MeanFieldState& final_state = trajectory.states.back();
  std::vector<double> fractions;
  for (int i = 0; i < n; ++i) fractions.push_back(final_state.opinion_fraction(i));
  ordered_json results;
  results["samples"] = trajectory.times.size();
  results["finalOpinionFractions"] = fractions;
  results["finalMass"] = final_state.mass();
  write_summary(dir, spec, std::move(results));
  if (!quiet) {
    std::ostringstream line;
    line << "meanfield: " << trajectory.times.size() << " samples, final opinion fractions [";
    for (std::size_t i = 0; i < fractions.size(); ++i) line << (i ? " " : "") << fmt(fractions[i]);
    line << "]";
    std::puts(line.str().c_str());
  }
  return 0;
}

int run_absorb_command(const ExperimentSpec& spec, const fs::path& dir, bool quiet) {
  const AbsorptionResult result =
      exact_absorption(spec.instance, spec.config, spec.state_limit);
  CsvWriter csv(dir / "absorption.csv", {"option", "probability", "mean_time"});
  for (int i = 0; i < spec.instance.n(); ++i)
    csv.row(i + 1, result.exit_probability[i], result.conditional_mean_time[i]);
  ordered_json results;
  results["states"] = result.num_states;
  results["exitProbability"] = result.exit_probability;
  results["conditionalMeanTime"] = result.conditional_mean_time;
  results["meanAbsorptionTime"] = result.mean_absorption_time;
  write_summary(dir, spec, std::move(results));
  if (!quiet) {
    std::ostringstream line;
    line << "absorb: " << result.num_states << " states, exit probability [";
    for (std::size_t i = 0; i < result.exit_probability.size(); ++i)
      line << (i ? " " : "") << fmt(result.exit_probability[i]);
    line << "], mean absorption time " << fmt(result.mean_absorption_time);
    std::puts(line.str().c_str());
  }
  return 0;
}

int run_sweep_command(const ExperimentSpec& spec, const fs::path& dir, bool quiet) {
  const SweepAxis& axis = *spec.sweep;
  const int n = spec.instance.n();
  std::vector<std::string> header{"parameter", "value", "repetitions", "decided",
                                  "non_decision_rate", "mean_decision_time",
                                  "decision_time_stderr"};
  for (int i = 1; i <= n; ++i) header.push_back("E_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("SE_" + std::to_string(i));
  CsvWriter csv(dir / "sweep.csv", header);

  ordered_json records = ordered_json::array();
  const auto sampler = make_sampler(spec);
  for (double value : axis.values) {
    SwarmConfig config = spec.config;
    ProblemInstance instance = spec.instance;
    apply_sweep_value(axis.parameter, value, config, instance);
    if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
    if (auto bad = validate_config(config, instance.n())) throw Error(bad->code, bad->message);
    const BatchMetrics metrics =
        batch(Engine::agent, config, instance, spec.repetitions, config.seed, sampler);

    std::vector<std::string> row{axis.parameter, fmt(value), fmt(metrics.repetitions),
                                 fmt(metrics.decided), fmt(metrics.non_decision_rate),
                                 fmt(metrics.mean_decision_time),
                                 fmt(metrics.decision_time_stderr)};
    for (double p : metrics.exit_probability) row.push_back(fmt(p));
    for (double se : metrics.exit_stderr) row.push_back(fmt(se));
    csv.write_row(row);

    ordered_json record = batch_json(metrics);
    record["value"] = value;
    records.push_back(std::move(record));
  }
  ordered_json results;
  results["parameter"] = axis.parameter;
  results["records"] = std::move(records);
  write_summary(dir, spec, std::move(results));
  if (!quiet)
    std::puts(("sweep: " + std::to_string(axis.values.size()) + " points over " +
               axis.parameter)
                  .c_str());
  return 0;
}

}  // namespace

Command command_from_name(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "ssa") return Command::ssa;
  if (name == "meanfield") return Command::meanfield;
  if (name == "absorb") return Command::absorb;
  if (name == "sweep") return Command::sweep;
  throw Error(Errc::validation_error,
              "command must be simulate, ssa, meanfield, absorb or sweep");
}

std::string_view command_name(Command command) noexcept {
  switch (command) {
    case Command::simulate: return "simulate";
    case Command::ssa: return "ssa";
    case Command::meanfield: return "meanfield";
    case Command::absorb: return "absorb";
    case Command::sweep: return "sweep";
  }
  return "unknown";
}

ExperimentSpec parse_spec(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!parsed.is_object()) throw Error(Errc::parse_error, "spec must be a JSON object");

  static const char* allowed[] = {
      "command", "instance", "scenario", "N", "g", "G", "sigma", "qMin", "rule",
      "includeSelf", "initialOpinions", "tau", "maxTime", "seed", "repetitions",
      "withReplacement", "initialPhase", "sampleInterval", "horizon", "dt",
      "stateLimit", "sweep", "output"};
  for (const auto& [key, value] : parsed.items()) {
    (void)value;
    if (std::find_if(std::begin(allowed), std::end(allowed),
                     [&](const char* k) { return key == k; }) == std::end(allowed))
      throw Error(Errc::unknown_key, "unknown spec key \"" + key + "\"");
  }

  ExperimentSpec spec;
  try {
    if (parsed.contains("command"))
      spec.command = command_from_name(parsed.at("command").get<std::string>());

    const bool has_instance = parsed.contains("instance");
    const bool has_scenario = parsed.contains("scenario");
    if (has_instance == has_scenario)
      throw Error(Errc::validation_error,
                  "exactly one of \"instance\" and \"scenario\" is required");
    if (has_instance) {
      const auto& node = parsed.at("instance");
      spec.instance = node.is_string()
                          ? parse_instance(read_file(fs::path(base_dir) / node.get<std::string>()))
                          : parse_instance(node.dump());
    } else {
      const auto& node = parsed.at("scenario");
      LoadedScenario loaded =
          node.is_string()
              ? load_scenario_file((fs::path(base_dir) / node.get<std::string>()).string())
              : parse_scenario(node.dump());
      spec.instance = std::move(loaded.instance);
      spec.scenario_type = std::move(loaded.type);
      spec.perception = std::move(loaded.perception);
    }

    SwarmConfig& config = spec.config;
    if (parsed.contains("N")) config.N = parsed.at("N").get<int>();
    if (parsed.contains("g")) config.g = parsed.at("g").get<double>();
    if (parsed.contains("G")) config.G = parsed.at("G").get<int>();
    if (parsed.contains("sigma")) config.sigma = parsed.at("sigma").get<double>();
    if (parsed.contains("qMin")) config.q_min = parsed.at("qMin").get<double>();
    if (parsed.contains("rule"))
      config.rule.kind = rule_from_name(parsed.at("rule").get<std::string>());
    if (parsed.contains("includeSelf"))
      config.rule.include_self = parsed.at("includeSelf").get<bool>();
    if (parsed.contains("initialOpinions"))
      config.initial_opinions = parsed.at("initialOpinions").get<std::vector<double>>();
    else
      config.initial_opinions.assign(spec.instance.n(), 1.0 / spec.instance.n());
    if (parsed.contains("tau")) config.tau = parsed.at("tau").get<double>();
    if (parsed.contains("maxTime")) config.max_time = parsed.at("maxTime").get<double>();
    if (parsed.contains("seed")) config.seed = parsed.at("seed").get<std::uint64_t>();
    if (parsed.contains("withReplacement"))
      config.with_replacement = parsed.at("withReplacement").get<bool>();
    if (parsed.contains("initialPhase"))
      config.initial_phase = phase_from_name(parsed.at("initialPhase").get<std::string>());
    if (parsed.contains("sampleInterval"))
      config.sample_interval = parsed.at("sampleInterval").get<double>();
    if (parsed.contains("repetitions")) spec.repetitions = parsed.at("repetitions").get<int>();
    if (parsed.contains("horizon")) spec.horizon = parsed.at("horizon").get<double>();
    if (parsed.contains("dt")) spec.dt = parsed.at("dt").get<double>();
    if (parsed.contains("stateLimit"))
      spec.state_limit = parsed.at("stateLimit").get<std::size_t>();
    if (parsed.contains("output")) spec.output_dir = parsed.at("output").get<std::string>();

    if (parsed.contains("sweep")) {
      const auto& node = parsed.at("sweep");
      if (!node.is_object())
        throw Error(Errc::validation_error, "sweep must be an object");
      for (const auto& [key, value] : node.items()) {
        (void)value;
        if (key != "parameter" && key != "values")
          throw Error(Errc::unknown_key, "unknown sweep key \"" + key + "\"");
      }
      SweepAxis axis;
      axis.parameter = node.at("parameter").get<std::string>();
      axis.values = node.at("values").get<std::vector<double>>();
      if (axis.values.empty())
        throw Error(Errc::validation_error, "sweep.values must be non-empty");
      // Fail early if the parameter names nothing.
      SwarmConfig probe_config = spec.config;
      ProblemInstance probe_instance = spec.instance;
      apply_sweep_value(axis.parameter, axis.values.front(), probe_config, probe_instance);
      spec.sweep = std::move(axis);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }

  if (spec.command == Command::sweep && !spec.sweep)
    throw Error(Errc::validation_error, "command \"sweep\" requires a sweep axis");
  if (spec.sweep && spec.command && spec.command != Command::sweep)
    throw Error(Errc::validation_error, "a sweep axis requires command \"sweep\"");
  if (auto bad = validate(spec.instance)) throw Error(bad->code, bad->message);
  if (auto bad = validate_config(spec.config, spec.instance.n()))
    throw Error(bad->code, bad->message);
  if (spec.repetitions < 1)
    throw Error(Errc::validation_error, "repetitions must be >= 1");
  if (!(spec.dt > 0.0)) throw Error(Errc::validation_error, "dt must be > 0");
  if (!(spec.horizon > 0.0)) throw Error(Errc::validation_error, "horizon must be > 0");
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  return parse_spec(read_file(path), fs::path(path).parent_path().string());
}

int execute(const ExperimentSpec& input, const RunOverrides& overrides) {
  ExperimentSpec spec = input;
  if (overrides.command) spec.command = overrides.command;
  if (overrides.output_dir) spec.output_dir = *overrides.output_dir;
  if (overrides.seed) spec.config.seed = *overrides.seed;
  if (overrides.repetitions) spec.repetitions = *overrides.repetitions;
  if (!spec.command)
    throw Error(Errc::validation_error,
                "no command given (set it in the spec file or on the command line)");
  if (*spec.command == Command::sweep && !spec.sweep)
    throw Error(Errc::validation_error, "command \"sweep\" requires a sweep axis");
  if (*spec.command != Command::sweep && spec.sweep)
    throw Error(Errc::validation_error, "a sweep axis requires command \"sweep\"");

  const fs::path dir(spec.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create output directory " + dir.string());

  switch (*spec.command) {
    case Command::simulate:
    case Command::ssa:
      return run_batch_command(spec, dir, overrides.quiet);
    case Command::meanfield:
      return run_meanfield_command(spec, dir, overrides.quiet);
    case Command::absorb:
      return run_absorb_command(spec, dir, overrides.quiet);
    case Command::sweep:
      return run_sweep_command(spec, dir, overrides.quiet);
  }
  return 1;
}

}  // namespace bestofn
