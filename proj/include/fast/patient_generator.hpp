#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fast/rng.hpp"
#include "fast/trial_model.hpp"

namespace fast {

// Arms currently open to randomization.
class ActiveArms {
 public:
  ActiveArms() = default;

  bool domain_a_terminated() const noexcept { return terminated_; }
  bool is_active(ArmA arm) const noexcept {
    return !terminated_ && open_[static_cast<std::size_t>(arm)];
  }
  /// Open Domain A arms in label order; empty once terminated.
  std::vector<ArmA> domain_a() const;

  /// Restricts Domain A to the control plus `retained` (A1 and/or A2).
  void retain_only(const std::vector<ArmA>& retained);
  void terminate_domain_a() noexcept { terminated_ = true; }

  /// Control open and at least one of A1/A2 open, or Domain A terminated.
  bool valid() const noexcept;

 private:
  bool terminated_ = false;
  std::array<bool, 3> open_{true, true, true};
};

struct Assignment {
  std::optional<ArmA> arm_a;
  ArmB arm_b = ArmB::B0;
};

/// Equal allocation within each active domain, independently across domains.
Assignment randomize_subject(Rng& rng, const ActiveArms& active);

struct Biomarkers {
  double y11 = 0.0;
  double y12 = 0.0;
};

/// Normal biomarker draws around the arm's configured shift (zero for the
/// control arm and for subjects without a Domain A assignment).
Biomarkers generate_biomarkers(std::optional<ArmA> arm_a, const ScenarioConfig& config,
                               Rng& rng);

inline constexpr double kMinEventProbability = 0.001;
inline constexpr double kMaxEventProbability = 0.999;

struct Phase3Draw {
  std::uint8_t y21 = 0;
  double probability = 0.0;  // after clamping
  bool clamped = false;
};

Phase3Draw generate_phase3_outcome(std::optional<ArmA> arm_a, ArmB arm_b,
                                   const ScenarioConfig& config, Rng& rng);

/// Randomizes one subject and draws all of its outcomes. Stream consumption
/// order: Domain A, Domain B, Y11, Y12, Y21.
SubjectRecord generate_subject(int index, const ActiveArms& active,
                               const ScenarioConfig& config, Rng& rng,
                               bool* clamped = nullptr);

}  // namespace fast
