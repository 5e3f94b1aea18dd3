#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/errors.hpp"

namespace bestofn {

/// 1-based identifier of one option of a best-of-n instance.
struct OptionId {
  int index = 0;

  constexpr auto operator<=>(const OptionId&) const = default;
  /// 0-based position into the instance's option vector.
  constexpr std::size_t offset() const { return static_cast<std::size_t>(index - 1); }
};

/// One alternative: a normalized benefit and the mean time needed to assess it.
struct OptionProfile {
  double quality = 1.0;  // in (0, 1], 1 = best option after normalization
  double cost = 1.0;     // mean exploration duration, > 0
};

/// How quality and cost relate when both differ across options.
enum class Interaction { synergistic, antagonistic, not_applicable };

/// The five problem variants, keyed by which axes are asymmetric.
enum class Variant {
  symmetry_breaking,
  cost_asymmetric,
  quality_asymmetric,
  synergistic,
  antagonistic,
};

/// A point of the optional time-varying quality hook: from `time` onward the
/// options take the given quality vector.
struct QualityScheduleEntry {
  double time = 0.0;
  std::vector<double> quality;
};

/// A full best-of-n problem: n >= 2 options, each with quality and cost.
/// Qualities are normalized so the best option has quality 1.
struct ProblemInstance {
  std::vector<OptionProfile> options;
  Interaction interaction = Interaction::not_applicable;
  std::vector<QualityScheduleEntry> quality_schedule;  // sorted by time, may be empty

  int n() const { return static_cast<int>(options.size()); }
  double quality(OptionId id) const { return options[id.offset()].quality; }
  double cost(OptionId id) const { return options[id.offset()].cost; }

  /// Quality of an option at a given time, honoring the schedule hook.
  double quality_at(OptionId id, double time) const;
};

struct Violation {
  Errc code;
  std::string message;
};

/// Default tolerance for treating two qualities or costs as equal.
inline constexpr double kDefaultEpsilon = 1e-9;

/// Builds an instance from raw quality/cost vectors: normalizes qualities to
/// max 1 and resolves the interaction field (forced to not_applicable when
/// either axis is symmetric). Throws Error on invalid input.
ProblemInstance make_instance(const std::vector<double>& quality,
                              const std::vector<double>& cost,
                              Interaction interaction = Interaction::not_applicable,
                              double epsilon = kDefaultEpsilon);

/// Checks all ProblemInstance invariants; returns the first violation, or
/// nullopt when the instance is well-formed.
std::optional<Violation> validate(const ProblemInstance& instance);

/// Classifies a valid instance into its variant. Throws Error
/// (missing_interaction) when both axes are asymmetric but no interaction was
/// declared.
Variant classify_variant(const ProblemInstance& instance, double epsilon = kDefaultEpsilon);

/// The option(s) that count as best for the instance's variant. Always
/// non-empty for valid instances; sorted by index.
std::vector<OptionId> best_options(const ProblemInstance& instance,
                                   double epsilon = kDefaultEpsilon);

/// Relative comparison used for the symmetry checks: a and b are equal when
/// |a - b| <= epsilon * max(|a|, |b|). Relative form keeps classification
/// invariant under common rescaling of all costs.
bool nearly_equal(double a, double b, double epsilon);

// JSON serialization. Schema (exact field names):
//   {"n": int, "quality": [real], "cost": [real],
//    "interaction": "synergistic"|"antagonistic"|"na"}
// plus an optional "qualitySchedule": [{"time": real, "quality": [real]}].
// Parsing is strict: unknown keys are rejected; qualities are normalized on
// load via make_instance.
ProblemInstance parse_instance(const std::string& json_text);
std::string instance_to_json(const ProblemInstance& instance);

std::string_view variant_name(Variant v) noexcept;
std::string_view interaction_name(Interaction i) noexcept;

}  // namespace bestofn
