#include "fast/trial_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace fast {

using nlohmann::json;

std::string_view to_string(ArmA arm) {
  switch (arm) {
    case ArmA::A0: return "A0";
    case ArmA::A1: return "A1";
    case ArmA::A2: return "A2";
  }
  return "?";
}

std::string_view to_string(ArmB arm) { return arm == ArmB::B0 ? "B0" : "B1"; }

std::string_view to_string(Direction direction) {
  return direction == Direction::increase ? "increase" : "decrease";
}

std::optional<ArmA> parse_arm_a(std::string_view text) {
  if (text == "A0") return ArmA::A0;
  if (text == "A1") return ArmA::A1;
  if (text == "A2") return ArmA::A2;
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "increase") return Direction::increase;
  if (text == "decrease") return Direction::decrease;
  return std::nullopt;
}

std::string OutcomeSpec::name() const {
  return "Y" + std::to_string(phase) + std::to_string(index);
}

DesignSpec motivating_design() {
  DesignSpec design;
  design.domains = {{"A", {"A0", "A1", "A2"}}, {"B", {"B0", "B1"}}};
  design.phase2_outcomes = {
      {1, 1, OutcomeKind::continuous, Direction::increase},
      {1, 2, OutcomeKind::continuous, Direction::decrease},
  };
  // Y21 is a poor functional outcome, so benefit is a decrease.
  design.phase3_outcome = {2, 1, OutcomeKind::binary, Direction::decrease};
  return design;
}

std::vector<int> default_timing_grid() {
  std::vector<int> grid;
  for (int n = 90; n <= 300; n += 30) grid.push_back(n);
  return grid;
}

BiomarkerShift ScenarioConfig::biomarker_shift(std::optional<ArmA> arm) const {
  if (arm == ArmA::A1) return effect_a1;
  if (arm == ArmA::A2) return effect_a2;
  return {};
}

double ScenarioConfig::risk_difference(ArmA arm) const {
  switch (arm) {
    case ArmA::A0: return 0.0;
    case ArmA::A1: return phase3_effects.a1;
    case ArmA::A2: return phase3_effects.a2;
  }
  return 0.0;
}

double ScenarioConfig::risk_difference(ArmB arm) const {
  return arm == ArmB::B1 ? phase3_effects.b1 : 0.0;
}

double ScenarioConfig::event_probability(std::optional<ArmA> arm_a, ArmB arm_b) const {
  double p = control_event_rate + risk_difference(arm_b);
  if (arm_a) p += risk_difference(*arm_a);
  return p;
}

namespace {

bool valid_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void check_open_unit(std::vector<ValidationIssue>& issues, const std::string& field,
                     double value) {
  if (!(value > 0.0 && value < 1.0)) {
    issues.push_back({field, "must lie strictly between 0 and 1"});
  }
}

void check_grid(std::vector<ValidationIssue>& issues, const std::string& field,
                const std::vector<int>& grid, int n_total) {
  if (grid.empty()) {
    issues.push_back({field, "grid must not be empty"});
    return;
  }
  std::set<int> seen;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string path = field + "[" + std::to_string(i) + "]";
    if (grid[i] < 1) issues.push_back({path, "trigger must be at least 1"});
    if (grid[i] > n_total) {
      issues.push_back({path, "trigger " + std::to_string(grid[i]) +
                                  " exceeds n_total " + std::to_string(n_total)});
    }
    if (!seen.insert(grid[i]).second) {
      issues.push_back({path, "duplicate trigger " + std::to_string(grid[i])});
    }
  }
}

void check_finite(std::vector<ValidationIssue>& issues, const std::string& field,
                  double value) {
  if (!std::isfinite(value)) issues.push_back({field, "must be finite"});
}

}  // namespace

std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& c) {
  std::vector<ValidationIssue> issues;
  if (!valid_id(c.scenario_id)) {
    issues.push_back({"scenario_id", "must be non-empty and use only [A-Za-z0-9_.-]"});
  }
  check_finite(issues, "biomarker_effects.A1.y11", c.effect_a1.y11);
  check_finite(issues, "biomarker_effects.A1.y12", c.effect_a1.y12);
  check_finite(issues, "biomarker_effects.A2.y11", c.effect_a2.y11);
  check_finite(issues, "biomarker_effects.A2.y12", c.effect_a2.y12);
  if (!(c.biomarker_sds.y11 >= 0.0) || !std::isfinite(c.biomarker_sds.y11)) {
    issues.push_back({"biomarker_sds.y11", "must be finite and non-negative"});
  }
  if (!(c.biomarker_sds.y12 >= 0.0) || !std::isfinite(c.biomarker_sds.y12)) {
    issues.push_back({"biomarker_sds.y12", "must be finite and non-negative"});
  }
  check_finite(issues, "phase3_effects.A1", c.phase3_effects.a1);
  check_finite(issues, "phase3_effects.A2", c.phase3_effects.a2);
  check_finite(issues, "phase3_effects.B1", c.phase3_effects.b1);
  check_open_unit(issues, "control_event_rate", c.control_event_rate);

  for (ArmA a : {ArmA::A0, ArmA::A1, ArmA::A2}) {
    for (ArmB b : {ArmB::B0, ArmB::B1}) {
      const double p = c.event_probability(a, b);
      if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream reason;
        reason << "event probability " << p << " for arms " << to_string(a) << "+"
               << to_string(b) << " lies outside (0, 1)";
        std::string field = "phase3_effects";
        if (a != ArmA::A0) field += "." + std::string(to_string(a));
        if (b != ArmB::B0) field += "." + std::string(to_string(b));
        if (a == ArmA::A0 && b == ArmB::B0) field = "control_event_rate";
        issues.push_back({field, reason.str()});
      }
    }
  }

  if (c.n_total < 1) issues.push_back({"n_total", "must be positive"});
  check_grid(issues, "n_drop_grid", c.n_drop_grid, c.n_total);
  check_grid(issues, "n_feas_grid", c.n_feas_grid, c.n_total);
  check_open_unit(issues, "alpha_drop", c.alpha_drop);
  check_open_unit(issues, "alpha_feas", c.alpha_feas);
  check_open_unit(issues, "alpha_final", c.alpha_final);
  if (c.default_retained_arm == ArmA::A0) {
    issues.push_back({"default_retained_arm", "must be a non-control arm (A1 or A2)"});
  }
  if (c.replicates < 1) issues.push_back({"replicates", "must be at least 1"});
  return issues;
}

ScenarioConfig validated(ScenarioConfig config) {
  auto issues = validate_scenario(config);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

json scenario_to_json(const ScenarioConfig& c) {
  json doc;
  doc["scenario_id"] = c.scenario_id;
  doc["biomarker_effects"] = {
      {"A1", {{"y11", c.effect_a1.y11}, {"y12", c.effect_a1.y12}}},
      {"A2", {{"y11", c.effect_a2.y11}, {"y12", c.effect_a2.y12}}},
  };
  doc["biomarker_sds"] = {{"y11", c.biomarker_sds.y11}, {"y12", c.biomarker_sds.y12}};
  doc["phase3_effects"] = {
      {"A1", c.phase3_effects.a1}, {"A2", c.phase3_effects.a2}, {"B1", c.phase3_effects.b1}};
  doc["control_event_rate"] = c.control_event_rate;
  doc["n_total"] = c.n_total;
  doc["n_drop_grid"] = c.n_drop_grid;
  doc["n_feas_grid"] = c.n_feas_grid;
  doc["alpha_drop"] = c.alpha_drop;
  doc["alpha_feas"] = c.alpha_feas;
  doc["alpha_final"] = c.alpha_final;
  doc["default_retained_arm"] = std::string(to_string(c.default_retained_arm));
  doc["y11_benefit"] = std::string(to_string(c.y11_benefit));
  doc["y12_benefit"] = std::string(to_string(c.y12_benefit));
  doc["replicates"] = c.replicates;
  doc["base_seed"] = c.base_seed;
  return doc;
}

namespace {

// Strict reader: records type errors and unknown keys with their paths.
class Reader {
 public:
  explicit Reader(std::vector<ValidationIssue>& issues) : issues_(issues) {}

  void require_object(const json& node, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
    if (!node.is_object()) {
      issues_.push_back({path, "must be an object"});
      return;
    }
    for (const auto& [key, value] : node.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        issues_.push_back({join(path, key), "unknown key"});
      }
    }
  }

  void number(const json& node, const std::string& key, const std::string& path,
              double& out) {
    if (!node.is_object() || !node.contains(key)) return;
    const auto& v = node.at(key);
    if (!v.is_number()) {
      issues_.push_back({join(path, key), "must be a number"});
      return;
    }
    out = v.get<double>();
  }

  void integer(const json& node, const std::string& key, const std::string& path,
               int& out) {
    if (!node.is_object() || !node.contains(key)) return;
    const auto& v = node.at(key);
    if (!v.is_number_integer()) {
      issues_.push_back({join(path, key), "must be an integer"});
      return;
    }
    const auto value = v.get<std::int64_t>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      issues_.push_back({join(path, key), "integer out of range"});
      return;
    }
    out = static_cast<int>(value);
  }

  void seed(const json& node, const std::string& key, std::uint64_t& out) {
    if (!node.contains(key)) return;
    const auto& v = node.at(key);
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      issues_.push_back({key, "must be a non-negative 64-bit integer"});
    }
  }

  void integer_list(const json& node, const std::string& key, std::vector<int>& out) {
    if (!node.contains(key)) return;
    const auto& v = node.at(key);
    if (!v.is_array()) {
      issues_.push_back({key, "must be an array of integers"});
      return;
    }
    std::vector<int> values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        issues_.push_back({key + "[" + std::to_string(i) + "]", "must be an integer"});
        return;
      }
      values.push_back(static_cast<int>(v[i].get<std::int64_t>()));
    }
    out = std::move(values);
  }

  void string(const json& node, const std::string& key, std::string& out) {
    if (!node.contains(key)) return;
    const auto& v = node.at(key);
    if (!v.is_string()) {
      issues_.push_back({key, "must be a string"});
      return;
    }
    out = v.get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<ValidationIssue>& issues_;
};

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  std::vector<ValidationIssue> issues;
  Reader reader(issues);
  ScenarioConfig c;
  reader.require_object(doc, "",
                        {"scenario_id", "biomarker_effects", "biomarker_sds",
                         "phase3_effects", "control_event_rate", "n_total",
                         "n_drop_grid", "n_feas_grid", "alpha_drop", "alpha_feas",
                         "alpha_final", "default_retained_arm", "y11_benefit",
                         "y12_benefit", "replicates", "base_seed"});
  if (!doc.is_object()) throw ConfigError(std::move(issues));

  reader.string(doc, "scenario_id", c.scenario_id);
  if (doc.contains("biomarker_effects")) {
    const auto& effects = doc.at("biomarker_effects");
    reader.require_object(effects, "biomarker_effects", {"A1", "A2"});
    for (auto [key, target] : {std::pair{"A1", &c.effect_a1}, std::pair{"A2", &c.effect_a2}}) {
      if (!effects.is_object() || !effects.contains(key)) continue;
      const std::string path = std::string("biomarker_effects.") + key;
      reader.require_object(effects.at(key), path, {"y11", "y12"});
      reader.number(effects.at(key), "y11", path, target->y11);
      reader.number(effects.at(key), "y12", path, target->y12);
    }
  }
  if (doc.contains("biomarker_sds")) {
    const auto& sds = doc.at("biomarker_sds");
    reader.require_object(sds, "biomarker_sds", {"y11", "y12"});
    reader.number(sds, "y11", "biomarker_sds", c.biomarker_sds.y11);
    reader.number(sds, "y12", "biomarker_sds", c.biomarker_sds.y12);
  }
  if (doc.contains("phase3_effects")) {
    const auto& rd = doc.at("phase3_effects");
    reader.require_object(rd, "phase3_effects", {"A1", "A2", "B1"});
    reader.number(rd, "A1", "phase3_effects", c.phase3_effects.a1);
    reader.number(rd, "A2", "phase3_effects", c.phase3_effects.a2);
    reader.number(rd, "B1", "phase3_effects", c.phase3_effects.b1);
  }
  reader.number(doc, "control_event_rate", "", c.control_event_rate);
  reader.integer(doc, "n_total", "", c.n_total);
  reader.integer_list(doc, "n_drop_grid", c.n_drop_grid);
  reader.integer_list(doc, "n_feas_grid", c.n_feas_grid);
  reader.number(doc, "alpha_drop", "", c.alpha_drop);
  reader.number(doc, "alpha_feas", "", c.alpha_feas);
  reader.number(doc, "alpha_final", "", c.alpha_final);
  reader.integer(doc, "replicates", "", c.replicates);
  reader.seed(doc, "base_seed", c.base_seed);

  std::string text;
  if (doc.contains("default_retained_arm")) {
    reader.string(doc, "default_retained_arm", text);
    auto arm = parse_arm_a(text);
    if (doc.at("default_retained_arm").is_string()) {
      if (!arm) issues.push_back({"default_retained_arm", "unknown arm '" + text + "'"});
      else c.default_retained_arm = *arm;
    }
  }
  for (auto [key, target] : {std::pair{"y11_benefit", &c.y11_benefit},
                             std::pair{"y12_benefit", &c.y12_benefit}}) {
    if (!doc.contains(key) || !doc.at(key).is_string()) {
      if (doc.contains(key)) issues.push_back({key, "must be \"increase\" or \"decrease\""});
      continue;
    }
    auto direction = parse_direction(doc.at(key).get<std::string>());
    if (!direction) issues.push_back({key, "must be \"increase\" or \"decrease\""});
    else *target = *direction;
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

std::vector<ScenarioConfig> scenarios_from_json(const json& doc) {
  std::vector<ScenarioConfig> out;
  if (doc.is_object() && doc.contains("scenarios")) {
    if (doc.size() != 1) {
      throw ConfigError("", "a scenario list file may only contain the key \"scenarios\"");
    }
    const auto& list = doc.at("scenarios");
    if (!list.is_array() || list.empty()) {
      throw ConfigError("scenarios", "must be a non-empty array");
    }
    std::vector<ValidationIssue> issues;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string prefix = "scenarios[" + std::to_string(i) + "].";
      try {
        out.push_back(scenario_from_json(list[i]));
        if (!ids.insert(out.back().scenario_id).second) {
          issues.push_back({prefix + "scenario_id", "duplicate scenario id"});
        }
      } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) {
          issues.push_back({prefix + issue.field, issue.reason});
        }
      }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return out;
  }
  out.push_back(scenario_from_json(doc));
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return scenarios_from_json(doc);
}

}  // namespace fast
