#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fast/hypothesis_tests.hpp"
#include "fast/trial_model.hpp"

namespace fast {

struct BiomarkerDirections {
  Direction y11 = Direction::increase;
  Direction y12 = Direction::decrease;
};

// Outcome of the A1-vs-A2 comparison on the two biomarkers.
struct RetentionDecision {
  std::vector<ArmA> retained;  // subset of {A1, A2}, label order, never empty
  TestResult test_y11;
  TestResult test_y12;
  std::optional<ArmA> nominated_by_y11;
  std::optional<ArmA> nominated_by_y12;
  bool used_default = false;
  double mean_y11_a1 = 0.0;
  double mean_y11_a2 = 0.0;
  double mean_y12_a1 = 0.0;
  double mean_y12_a2 = 0.0;

  bool retains_both() const { return retained.size() == 2; }
};

/// The retention rule on its own. A significant biomarker test nominates the
/// arm whose mean is better in that biomarker's benefit direction; retained
/// is the union of nominations, or the default arm when there are none.
RetentionDecision decide_retention(const TestResult& test_y11, const TestResult& test_y12,
                                   double mean_y11_a1, double mean_y11_a2,
                                   double mean_y12_a1, double mean_y12_a2,
                                   double alpha_drop, ArmA default_arm,
                                   BiomarkerDirections directions = {});

/// Two-sided Welch tests of A1 vs A2 on Y11 and Y12 over every subject
/// randomized to those arms so far. Throws SchedulingError if either arm has
/// fewer than two subjects.
RetentionDecision arm_dropping_analysis(std::span<const SubjectRecord> subjects,
                                        double alpha_drop, ArmA default_arm,
                                        BiomarkerDirections directions = {});

struct FeasibilityDecision {
  bool proceed = false;
  TestResult test;
  double pooled_mean = 0.0;
  double control_mean = 0.0;
};

/// One-sided Welch test of the pooled A1+A2 subjects (including any arm that
/// has since been dropped) against A0 on Y11. Proceeds when the pooled mean
/// is significantly better in `direction`.
FeasibilityDecision feasibility_analysis(std::span<const SubjectRecord> subjects,
                                         double alpha_feas, Direction direction);

enum class AnalysisKind { arm_dropping, feasibility };

std::string_view to_string(AnalysisKind kind);

struct AnalysisSchedule {
  struct Slot {
    AnalysisKind kind = AnalysisKind::arm_dropping;
    int trigger = 0;
    bool operator==(const Slot&) const = default;
  };
  Slot first;
  Slot second;
  bool operator==(const AnalysisSchedule&) const = default;
};

/// Orders the two interim analyses by trigger; ties run arm-dropping first.
AnalysisSchedule build_schedule(int n_drop, int n_feas);

}  // namespace fast
