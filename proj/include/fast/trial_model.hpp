#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fast/errors.hpp"

namespace fast {

// Domain A: fluids. A0 is the saline control.
enum class ArmA : std::uint8_t { A0 = 0, A1 = 1, A2 = 2 };
// Domain B: mineralocorticoid. B0 is the no-treatment control.
enum class ArmB : std::uint8_t { B0 = 0, B1 = 1 };

enum class Direction { increase, decrease };
enum class OutcomeKind { continuous, binary };

std::string_view to_string(ArmA arm);
std::string_view to_string(ArmB arm);
std::string_view to_string(Direction direction);
std::optional<ArmA> parse_arm_a(std::string_view text);
std::optional<Direction> parse_direction(std::string_view text);

// Y_po: outcome o of trial phase p.
struct OutcomeSpec {
  int phase = 1;
  int index = 1;
  OutcomeKind kind = OutcomeKind::continuous;
  Direction direction_of_benefit = Direction::increase;

  std::string name() const;
  bool operator==(const OutcomeSpec&) const = default;
};

struct DomainSpec {
  std::string label;
  std::vector<std::string> arms;  // arms[0] is the control
};

struct DesignSpec {
  std::vector<DomainSpec> domains;
  std::vector<OutcomeSpec> phase2_outcomes;
  OutcomeSpec phase3_outcome;
};

/// The 3x2 factorial instance the decision engines are written for:
/// Domain A {A0, A1, A2}, Domain B {B0, B1}, biomarkers Y11/Y12 and the
/// binary Phase III outcome Y21.
DesignSpec motivating_design();

struct BiomarkerShift {
  double y11 = 0.0;
  double y12 = 0.0;
  bool operator==(const BiomarkerShift&) const = default;
};

struct BiomarkerSds {
  double y11 = 10.0;
  double y12 = 10.0;
  bool operator==(const BiomarkerSds&) const = default;
};

// Additive changes in event probability relative to control.
struct RiskDifferences {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  bool operator==(const RiskDifferences&) const = default;
};

std::vector<int> default_timing_grid();  // 90, 120, ..., 300

struct ScenarioConfig {
  std::string scenario_id = "scenario";
  BiomarkerShift effect_a1;  // mean shift of A1 relative to control
  BiomarkerShift effect_a2;
  BiomarkerSds biomarker_sds;
  RiskDifferences phase3_effects;
  double control_event_rate = 0.40;
  int n_total = 1000;
  std::vector<int> n_drop_grid = default_timing_grid();
  std::vector<int> n_feas_grid = default_timing_grid();
  double alpha_drop = 0.05;
  double alpha_feas = 0.05;
  double alpha_final = 0.05;
  ArmA default_retained_arm = ArmA::A2;
  // Which direction of each biomarker counts as a treatment benefit. The
  // arm-dropping rule keeps the arm with the higher Y11 and lower Y12 under
  // the defaults; the feasibility test is one-sided in the Y11 direction.
  Direction y11_benefit = Direction::increase;
  Direction y12_benefit = Direction::decrease;
  int replicates = 1000;
  std::uint64_t base_seed = 20240101;

  BiomarkerShift biomarker_shift(std::optional<ArmA> arm) const;
  double risk_difference(ArmA arm) const;
  double risk_difference(ArmB arm) const;
  /// Event probability before clamping. A missing Domain A assignment
  /// contributes no Domain A effect.
  double event_probability(std::optional<ArmA> arm_a, ArmB arm_b) const;

  bool operator==(const ScenarioConfig&) const = default;
};

// One virtual patient.
struct SubjectRecord {
  int index = 0;                // 1-based enrollment order
  std::optional<ArmA> arm_a;    // absent after Domain A termination
  ArmB arm_b = ArmB::B0;
  double y11 = 0.0;
  double y12 = 0.0;
  std::uint8_t y21 = 0;

  bool operator==(const SubjectRecord&) const = default;
};

/// Every violated constraint, each tagged with its field path. Empty when
/// the configuration is valid.
std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& config);

/// Returns `config` unchanged or throws ConfigError listing all violations.
ScenarioConfig validated(ScenarioConfig config);

// JSON scenario files. Keys mirror ScenarioConfig in lower_snake_case;
// missing keys take the defaults above, unknown keys are rejected.
nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

/// Accepts either one scenario object or {"scenarios": [ ... ]}.
std::vector<ScenarioConfig> scenarios_from_json(const nlohmann::json& doc);
std::vector<ScenarioConfig> load_scenarios(const std::string& path);

}  // namespace fast
