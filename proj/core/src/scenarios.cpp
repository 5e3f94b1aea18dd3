#include "bestofn/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bestofn {

using nlohmann::json;

namespace {

void require_positive(const std::vector<double>& values, const char* what) {
  if (values.size() < 2)
    throw Error(Errc::too_few_options, std::string(what) + " needs at least 2 entries");
  for (double v : values)
    if (!(v > 0.0))
      throw Error(Errc::validation_error, std::string(what) + " entries must be > 0");
}

void check_keys(const json& object, std::initializer_list<const char*> allowed,
                const char* what) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      throw Error(Errc::unknown_key,
                  "unknown " + std::string(what) + " key \"" + key + "\"");
  }
}

}  // namespace

ProblemInstance build_shortest_path(const PathScenario& scenario) {
  require_positive(scenario.lengths, "lengths");
  if (!(scenario.base_traversal_time > 0.0))
    throw Error(Errc::validation_error, "baseTraversalTime must be > 0");
  const double shortest = *std::min_element(scenario.lengths.begin(), scenario.lengths.end());
  std::vector<double> quality(scenario.lengths.size(), 1.0);
  std::vector<double> cost;
  cost.reserve(scenario.lengths.size());
  for (double length : scenario.lengths)
    cost.push_back(scenario.base_traversal_time * length / shortest);
  return make_instance(quality, cost);
}

ProblemInstance build_site_selection(const SiteScenario& scenario) {
  require_positive(scenario.areas, "areas");
  if (!(scenario.discovery_base > 0.0))
    throw Error(Errc::validation_error, "discoveryBase must be > 0");
  const double largest = *std::max_element(scenario.areas.begin(), scenario.areas.end());
  std::vector<double> quality, cost;
  quality.reserve(scenario.areas.size());
  cost.reserve(scenario.areas.size());
  for (double area : scenario.areas) {
    quality.push_back(area / largest);
    cost.push_back(scenario.discovery_base * largest / area);
  }
  return make_instance(quality, cost, Interaction::synergistic);
}

ProblemInstance build_collective_perception(const PerceptionScenario& scenario) {
  const auto& fractions = scenario.feature_fractions;
  if (fractions.size() < 2)
    throw Error(Errc::too_few_options, "featureFractions needs at least 2 entries");
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw Error(Errc::validation_error, "featureFractions must be >= 0");
    if (f == 0.0)
      throw Error(Errc::zero_fraction, "a feature with zero abundance cannot be observed");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(Errc::validation_error, "featureFractions must sum to 1");
  if (scenario.sample_size < 1)
    throw Error(Errc::validation_error, "sampleSize must be >= 1");

  const double spread = *std::max_element(fractions.begin(), fractions.end());
  std::vector<double> quality;
  quality.reserve(fractions.size());
  for (double f : fractions) quality.push_back(f / spread);

  std::vector<double> cost = scenario.cost;
  if (cost.empty()) cost.assign(fractions.size(), 1.0);
  if (cost.size() != fractions.size())
    throw Error(Errc::validation_error, "cost must have one entry per feature");
  return make_instance(quality, cost);
}

double perception_quality_sampler(const PerceptionScenario& scenario, OptionId option,
                                  double q_min, RandomStream& rng) {
  const auto& fractions = scenario.feature_fractions;
  const double spread = *std::max_element(fractions.begin(), fractions.end());
  const int hits = rng.binomial(scenario.sample_size, fractions[option.offset()]);
  const double estimate =
      (static_cast<double>(hits) / scenario.sample_size) / spread;
  return std::clamp(estimate, q_min, 1.0);
}

QualitySampler make_perception_sampler(PerceptionScenario scenario, double q_min) {
  return [scenario = std::move(scenario), q_min](OptionId option, double /*now*/,
                                                 RandomStream& rng) {
    return perception_quality_sampler(scenario, option, q_min, rng);
  };
}

LoadedScenario parse_scenario(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!parsed.is_object() || !parsed.contains("type"))
    throw Error(Errc::validation_error, "scenario must be an object with a \"type\" key");

  try {
    const auto type = parsed.at("type").get<std::string>();
    LoadedScenario loaded;
    loaded.type = type;
    if (type == "shortest_path") {
      check_keys(parsed, {"type", "lengths", "baseTraversalTime"}, "shortest_path");
      PathScenario scenario;
      scenario.lengths = parsed.at("lengths").get<std::vector<double>>();
      if (parsed.contains("baseTraversalTime"))
        scenario.base_traversal_time = parsed.at("baseTraversalTime").get<double>();
      loaded.instance = build_shortest_path(scenario);
    } else if (type == "site_selection") {
      check_keys(parsed, {"type", "areas", "discoveryBase"}, "site_selection");
      SiteScenario scenario;
      scenario.areas = parsed.at("areas").get<std::vector<double>>();
      if (parsed.contains("discoveryBase"))
        scenario.discovery_base = parsed.at("discoveryBase").get<double>();
      loaded.instance = build_site_selection(scenario);
    } else if (type == "collective_perception") {
      check_keys(parsed, {"type", "featureFractions", "sampleSize", "cost"},
                 "collective_perception");
      PerceptionScenario scenario;
      scenario.feature_fractions = parsed.at("featureFractions").get<std::vector<double>>();
      if (parsed.contains("sampleSize"))
        scenario.sample_size = parsed.at("sampleSize").get<int>();
      if (parsed.contains("cost"))
        scenario.cost = parsed.at("cost").get<std::vector<double>>();
      loaded.instance = build_collective_perception(scenario);
      loaded.perception = std::move(scenario);
    } else {
      throw Error(Errc::validation_error, "unknown scenario type \"" + type + "\"");
    }
    return loaded;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

LoadedScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open scenario file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace bestofn
