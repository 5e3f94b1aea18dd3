#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bestofn/problem.hpp"
#include "bestofn/strategy.hpp"

namespace bestofn {

// Builders that turn three concrete application settings into best-of-n
// instances: route choice between paths of different length, selection among
// sites of different size, and classification of the most spread feature in
// an environment.

/// Paths between a source and a destination; only the traversal time differs.
struct PathScenario {
  std::vector<double> lengths;            // one per path, > 0
  double base_traversal_time = 1.0;       // exploration time of the shortest path
};

/// Candidate sites; larger sites are both better and easier to discover.
struct SiteScenario {
  std::vector<double> areas;   // one per site, > 0
  double discovery_base = 1.0; // exploration time of the largest site
};

/// Environment features; the quality of a feature is how spread it is.
struct PerceptionScenario {
  std::vector<double> feature_fractions;  // >= 0, sum to 1
  int sample_size = 10;                   // cells inspected per exploration
  std::vector<double> cost;               // optional per-option costs, default all 1
};

/// Equal qualities, costs proportional to path length (shortest path = cost 1
/// times the base traversal time).
ProblemInstance build_shortest_path(const PathScenario& scenario);

/// Quality proportional to area, discovery cost inversely proportional to it;
/// declared synergistic since the largest site wins on both axes.
ProblemInstance build_site_selection(const SiteScenario& scenario);

/// Quality proportional to feature abundance, symmetric unit costs (or the
/// scenario's explicit cost vector). Throws Error(zero_fraction) when a
/// feature has zero abundance.
ProblemInstance build_collective_perception(const PerceptionScenario& scenario);

/// Binomial abundance estimate for one option: inspect sample_size cells,
/// return the normalized observed fraction clamped to [q_min, 1]. Unbiased
/// before clamping. Used as the measure_quality override for perception
/// instances.
double perception_quality_sampler(const PerceptionScenario& scenario, OptionId option,
                                  double q_min, RandomStream& rng);

/// QualitySampler closure over a perception scenario.
QualitySampler make_perception_sampler(PerceptionScenario scenario, double q_min);

/// A scenario file: {"type": "shortest_path"|"site_selection"|
/// "collective_perception", ...type-specific fields...}. Strict keys.
struct LoadedScenario {
  ProblemInstance instance;
  std::string type;
  // Present only for collective_perception; replaces the Gaussian sampler.
  std::optional<PerceptionScenario> perception;
};

LoadedScenario parse_scenario(const std::string& json_text);
LoadedScenario load_scenario_file(const std::string& path);

}  // namespace bestofn
