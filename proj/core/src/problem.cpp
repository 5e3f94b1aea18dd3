#include "bestofn/problem.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace bestofn {

using nlohmann::json;

bool nearly_equal(double a, double b, double epsilon) {
  return std::abs(a - b) <= epsilon * std::max(std::abs(a), std::abs(b));
}

double ProblemInstance::quality_at(OptionId id, double time) const {
  const std::vector<double>* current = nullptr;
  for (const auto& entry : quality_schedule) {
    if (entry.time <= time) current = &entry.quality;
    else break;
  }
  if (current != nullptr) return (*current)[id.offset()];
  return quality(id);
}

namespace {

bool all_equal(const std::vector<double>& values, double epsilon) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!nearly_equal(values[i], values[0], epsilon)) return false;
  return true;
}

std::vector<double> qualities_of(const ProblemInstance& instance) {
  std::vector<double> q;
  q.reserve(instance.options.size());
  for (const auto& opt : instance.options) q.push_back(opt.quality);
  return q;
}

std::vector<double> costs_of(const ProblemInstance& instance) {
  std::vector<double> c;
  c.reserve(instance.options.size());
  for (const auto& opt : instance.options) c.push_back(opt.cost);
  return c;
}

std::optional<Violation> check_quality_vector(const std::vector<double>& quality,
                                              const char* what) {
  double max_quality = 0.0;
  for (double q : quality) {
    if (!(q > 0.0) || q > 1.0)
      return Violation{Errc::quality_out_of_range,
                       std::string(what) + " quality must lie in (0, 1]"};
    max_quality = std::max(max_quality, q);
  }
  if (std::abs(max_quality - 1.0) > kDefaultEpsilon)
    return Violation{Errc::not_normalized,
                     std::string(what) + " maximum quality must equal 1"};
  return std::nullopt;
}

/// Set of indices attaining the max (or min) of `values` within epsilon.
std::vector<OptionId> arg_extreme(const std::vector<double>& values, double epsilon,
                                  bool maximize) {
  const double extreme = maximize ? *std::max_element(values.begin(), values.end())
                                  : *std::min_element(values.begin(), values.end());
  std::vector<OptionId> ids;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (nearly_equal(values[i], extreme, epsilon)) ids.push_back({static_cast<int>(i) + 1});
  return ids;
}

/// Pareto front under (maximize quality, minimize cost), ties within epsilon.
std::vector<OptionId> pareto_front(const ProblemInstance& instance, double epsilon) {
  const int n = instance.n();
  std::vector<OptionId> front;
  for (int i = 0; i < n; ++i) {
    bool dominated = false;
    for (int j = 0; j < n && !dominated; ++j) {
      if (i == j) continue;
      const double qi = instance.options[i].quality, qj = instance.options[j].quality;
      const double ci = instance.options[i].cost, cj = instance.options[j].cost;
      const bool q_geq = qj > qi || nearly_equal(qi, qj, epsilon);
      const bool c_leq = cj < ci || nearly_equal(ci, cj, epsilon);
      const bool q_strict = qj > qi && !nearly_equal(qi, qj, epsilon);
      const bool c_strict = cj < ci && !nearly_equal(ci, cj, epsilon);
      dominated = q_geq && c_leq && (q_strict || c_strict);
    }
    if (!dominated) front.push_back({i + 1});
  }
  return front;
}

Interaction interaction_from_string(const std::string& text) {
  if (text == "synergistic") return Interaction::synergistic;
  if (text == "antagonistic") return Interaction::antagonistic;
  if (text == "na") return Interaction::not_applicable;
  throw Error(Errc::validation_error,
              "interaction must be \"synergistic\", \"antagonistic\" or \"na\", got \"" +
                  text + "\"");
}

}  // namespace

ProblemInstance make_instance(const std::vector<double>& quality,
                              const std::vector<double>& cost, Interaction interaction,
                              double epsilon) {
  if (quality.size() < 2)
    throw Error(Errc::too_few_options, "an instance needs at least 2 options");
  if (quality.size() != cost.size())
    throw Error(Errc::validation_error, "quality and cost vectors must have equal length");

  double max_quality = 0.0;
  for (double q : quality) {
    if (!(q > 0.0)) throw Error(Errc::quality_out_of_range, "quality must be > 0");
    max_quality = std::max(max_quality, q);
  }
  for (double c : cost) {
    if (!(c > 0.0)) throw Error(Errc::non_positive_cost, "cost must be > 0");
  }

  ProblemInstance instance;
  instance.options.reserve(quality.size());
  for (std::size_t i = 0; i < quality.size(); ++i)
    instance.options.push_back({quality[i] / max_quality, cost[i]});

  // Interaction applies only when both axes are asymmetric.
  const bool quality_symmetric = all_equal(qualities_of(instance), epsilon);
  const bool cost_symmetric = all_equal(costs_of(instance), epsilon);
  instance.interaction =
      (quality_symmetric || cost_symmetric) ? Interaction::not_applicable : interaction;
  return instance;
}

std::optional<Violation> validate(const ProblemInstance& instance) {
  if (instance.options.size() < 2)
    return Violation{Errc::too_few_options, "an instance needs at least 2 options"};
  for (const auto& opt : instance.options)
    if (!(opt.cost > 0.0))
      return Violation{Errc::non_positive_cost, "cost must be > 0"};
  if (auto bad = check_quality_vector(qualities_of(instance), "instance")) return bad;
  for (const auto& entry : instance.quality_schedule) {
    if (entry.quality.size() != instance.options.size())
      return Violation{Errc::validation_error,
                       "qualitySchedule vectors must have one entry per option"};
    if (auto bad = check_quality_vector(entry.quality, "scheduled")) return bad;
  }
  return std::nullopt;
}

Variant classify_variant(const ProblemInstance& instance, double epsilon) {
  const bool quality_symmetric = all_equal(qualities_of(instance), epsilon);
  const bool cost_symmetric = all_equal(costs_of(instance), epsilon);
  if (quality_symmetric && cost_symmetric) return Variant::symmetry_breaking;
  if (quality_symmetric) return Variant::cost_asymmetric;
  if (cost_symmetric) return Variant::quality_asymmetric;
  switch (instance.interaction) {
    case Interaction::synergistic: return Variant::synergistic;
    case Interaction::antagonistic: return Variant::antagonistic;
    case Interaction::not_applicable:
      throw Error(Errc::missing_interaction,
                  "both quality and cost are asymmetric; declare the interaction");
  }
  throw Error(Errc::missing_interaction, "unreachable");
}

std::vector<OptionId> best_options(const ProblemInstance& instance, double epsilon) {
  const auto variant = classify_variant(instance, epsilon);
  const auto qualities = qualities_of(instance);
  const auto costs = costs_of(instance);
  switch (variant) {
    case Variant::symmetry_breaking: {
      std::vector<OptionId> all;
      for (int i = 1; i <= instance.n(); ++i) all.push_back({i});
      return all;
    }
    case Variant::cost_asymmetric:
      return arg_extreme(costs, epsilon, /*maximize=*/false);
    case Variant::quality_asymmetric:
      return arg_extreme(qualities, epsilon, /*maximize=*/true);
    case Variant::synergistic: {
      auto by_quality = arg_extreme(qualities, epsilon, true);
      auto by_cost = arg_extreme(costs, epsilon, false);
      std::vector<OptionId> both;
      std::set_intersection(by_quality.begin(), by_quality.end(), by_cost.begin(),
                            by_cost.end(), std::back_inserter(both));
      // A declared-synergistic instance whose extremes do not coincide is
      // effectively antagonistic; fall back to the Pareto front so the
      // result is never empty.
      if (!both.empty()) return both;
      return pareto_front(instance, epsilon);
    }
    case Variant::antagonistic:
      return pareto_front(instance, epsilon);
  }
  return {};
}

ProblemInstance parse_instance(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!parsed.is_object()) throw Error(Errc::parse_error, "instance must be a JSON object");

  static const char* allowed[] = {"n", "quality", "cost", "interaction", "qualitySchedule"};
  for (const auto& [key, value] : parsed.items()) {
    (void)value;
    if (std::find_if(std::begin(allowed), std::end(allowed),
                     [&](const char* k) { return key == k; }) == std::end(allowed))
      throw Error(Errc::unknown_key, "unknown instance key \"" + key + "\"");
  }
  for (const char* key : {"n", "quality", "cost", "interaction"})
    if (!parsed.contains(key))
      throw Error(Errc::validation_error, std::string("missing instance key \"") + key + "\"");

  try {
    const int n = parsed.at("n").get<int>();
    const auto quality = parsed.at("quality").get<std::vector<double>>();
    const auto cost = parsed.at("cost").get<std::vector<double>>();
    if (static_cast<int>(quality.size()) != n || static_cast<int>(cost.size()) != n)
      throw Error(Errc::validation_error, "n must match the quality and cost array lengths");
    auto instance = make_instance(quality, cost,
                                  interaction_from_string(parsed.at("interaction").get<std::string>()));
    if (parsed.contains("qualitySchedule")) {
      for (const auto& item : parsed.at("qualitySchedule")) {
        QualityScheduleEntry entry;
        entry.time = item.at("time").get<double>();
        entry.quality = item.at("quality").get<std::vector<double>>();
        instance.quality_schedule.push_back(std::move(entry));
      }
      std::sort(instance.quality_schedule.begin(), instance.quality_schedule.end(),
                [](const auto& a, const auto& b) { return a.time < b.time; });
      if (auto bad = validate(instance)) throw Error(bad->code, bad->message);
    }
    return instance;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

std::string instance_to_json(const ProblemInstance& instance) {
  json out;
  out["n"] = instance.n();
  out["quality"] = qualities_of(instance);
  out["cost"] = costs_of(instance);
  out["interaction"] = std::string(interaction_name(instance.interaction));
  if (!instance.quality_schedule.empty()) {
    json schedule = json::array();
    for (const auto& entry : instance.quality_schedule)
      schedule.push_back({{"time", entry.time}, {"quality", entry.quality}});
    out["qualitySchedule"] = schedule;
  }
  return out.dump();
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::symmetry_breaking: return "symmetry_breaking";
    case Variant::cost_asymmetric: return "cost_asymmetric";
    case Variant::quality_asymmetric: return "quality_asymmetric";
    case Variant::synergistic: return "synergistic";
    case Variant::antagonistic: return "antagonistic";
  }
  return "unknown";
}

std::string_view interaction_name(Interaction i) noexcept {
  switch (i) {
    case Interaction::synergistic: return "synergistic";
    case Interaction::antagonistic: return "antagonistic";
    case Interaction::not_applicable: return "na";
  }
  return "na";
}

}  // namespace bestofn
