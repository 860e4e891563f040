#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fast/interim.hpp"
#include "fast/logistic.hpp"
#include "fast/trial_model.hpp"

namespace fast {

enum class Branch { one_arm_retained, both_arms_retained, domain_a_terminated };

std::string_view to_string(Branch branch);

// Arms that can be declared successful in the final analysis.
enum class SuccessArm : std::uint8_t { A_pooled = 0, A1 = 1, A2 = 2, B1 = 3 };

std::string_view to_string(SuccessArm arm);

class SuccessSet {
 public:
  void insert(SuccessArm arm) { bits_ |= bit(arm); }
  bool contains(SuccessArm arm) const { return bits_ & bit(arm); }
  bool empty() const { return bits_ == 0; }
  /// Labels joined with ':' in enum order, e.g. "A2:B1"; empty string if none.
  std::string label() const;
  bool operator==(const SuccessSet&) const = default;

 private:
  static std::uint8_t bit(SuccessArm arm) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(arm));
  }
  std::uint8_t bits_ = 0;
};

/// The branch implied by the interim decisions. Throws std::logic_error on an
/// inconsistent path (e.g. Domain A continuing without an arm-dropping
/// decision).
Branch select_branch(const std::optional<RetentionDecision>& retention,
                     const std::optional<FeasibilityDecision>& feasibility);

struct FinalModelSpec {
  Branch branch = Branch::both_arms_retained;
  std::vector<std::string> covariates;  // excludes the intercept
  std::string subject_filter;
};

// Model-ready data: column 0 of `design` is the intercept, followed by the
// treatment indicators named in spec.covariates.
struct FinalModelData {
  FinalModelSpec spec;
  BinaryMatrix design;
  std::vector<std::uint8_t> outcome;
};

FinalModelData build_final_model(std::span<const SubjectRecord> subjects, Branch branch);

// A hypothesis that a set of treatment coefficients are all zero. Bit j of
// `coefficients` refers to design column j + 1.
struct HypothesisNode {
  std::string id;
  std::uint32_t coefficients = 0;
};

/// Closed testing: a node is rejected when its own p-value is below alpha
/// and every node testing a strict superset of its coefficients is rejected.
std::vector<bool> closed_test(std::span<const HypothesisNode> nodes,
                              std::span<const double> p_values, double alpha);

/// H01..H07 over (beta_A1, beta_A2, beta_B1).
const std::array<HypothesisNode, 7>& both_retained_hypotheses();
/// global, A_pooled, B1 over (beta_pooled, beta_B1).
const std::array<HypothesisNode, 3>& one_retained_hypotheses();

/// Gating stage of the both-arms-retained hierarchy on given p-values.
std::array<bool, 7> gate_both_retained(const std::array<double, 7>& p_values, double alpha);

struct GatekeepingOutcome {
  Branch branch = Branch::both_arms_retained;
  std::vector<std::pair<std::string, double>> node_p_values;  // hierarchy order
  std::vector<std::string> rejected;
  SuccessSet successful_arms;

  bool is_rejected(std::string_view id) const;
};

/// Hypothesis table used by `branch`, in hierarchy order.
std::span<const HypothesisNode> hypotheses_for(Branch branch);

/// Applies the branch's closed-testing hierarchy to p-values given in the
/// order of hypotheses_for(branch) and maps rejected singletons to arms.
GatekeepingOutcome gate_from_p_values(Branch branch, std::span<const double> p_values,
                                      double alpha);

// Each of these throws FittingError when a required model fails to converge.
GatekeepingOutcome gatekeep_one_retained(const FinalModelData& data, double alpha_final);
GatekeepingOutcome gatekeep_both_retained(const FinalModelData& data, double alpha_final);
GatekeepingOutcome analyze_terminated(const FinalModelData& data, double alpha_final);

/// Builds the branch model and runs the matching analysis.
GatekeepingOutcome run_final_analysis(std::span<const SubjectRecord> subjects, Branch branch,
                                      double alpha_final);

}  // namespace fast
