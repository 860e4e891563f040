#include "fast/final_analysis.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "fast/errors.hpp"
#include "fast/hypothesis_tests.hpp"

namespace fast {

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::one_arm_retained: return "one_arm_retained";
    case Branch::both_arms_retained: return "both_arms_retained";
    case Branch::domain_a_terminated: return "domain_a_terminated";
  }
  return "?";
}

std::string_view to_string(SuccessArm arm) {
  switch (arm) {
    case SuccessArm::A_pooled: return "A_pooled";
    case SuccessArm::A1: return "A1";
    case SuccessArm::A2: return "A2";
    case SuccessArm::B1: return "B1";
  }
  return "?";
}

std::string SuccessSet::label() const {
  std::string out;
  for (SuccessArm arm : {SuccessArm::A_pooled, SuccessArm::A1, SuccessArm::A2, SuccessArm::B1}) {
    if (!contains(arm)) continue;
    if (!out.empty()) out += ':';
    out += to_string(arm);
  }
  return out;
}

bool GatekeepingOutcome::is_rejected(std::string_view id) const {
  return std::find(rejected.begin(), rejected.end(), id) != rejected.end();
}

Branch select_branch(const std::optional<RetentionDecision>& retention,
                     const std::optional<FeasibilityDecision>& feasibility) {
  if (!feasibility) throw std::logic_error("final analysis reached without a feasibility decision");
  if (!feasibility->proceed) return Branch::domain_a_terminated;
  if (!retention) {
    throw std::logic_error("Domain A continued but no arm-dropping decision was made");
  }
  return retention->retains_both() ? Branch::both_arms_retained : Branch::one_arm_retained;
}

FinalModelData build_final_model(std::span<const SubjectRecord> subjects, Branch branch) {
  FinalModelData data;
  data.spec.branch = branch;
  switch (branch) {
    case Branch::one_arm_retained:
      data.spec.covariates = {"I(arm_a != A0)", "I(arm_b == B1)"};
      data.spec.subject_filter = "all subjects with a Domain A assignment";
      break;
    case Branch::both_arms_retained:
      data.spec.covariates = {"I(arm_a == A1)", "I(arm_a == A2)", "I(arm_b == B1)"};
      data.spec.subject_filter = "all subjects with a Domain A assignment";
      break;
    case Branch::domain_a_terminated:
      data.spec.covariates = {"I(arm_b == B1)"};
      data.spec.subject_filter = "all enrolled subjects";
      break;
  }
  const std::size_t cols = data.spec.covariates.size() + 1;
  data.design = BinaryMatrix(0, cols);
  data.outcome.reserve(subjects.size());
  std::vector<std::uint8_t> row(cols);
  for (const auto& s : subjects) {
    const bool b1 = s.arm_b == ArmB::B1;
    row[0] = 1;
    if (branch == Branch::domain_a_terminated) {
      row[1] = b1;
    } else {
      if (!s.arm_a) {
        throw std::logic_error("subject " + std::to_string(s.index) +
                               " has no Domain A assignment but Domain A was not terminated");
      }
      if (branch == Branch::one_arm_retained) {
        row[1] = *s.arm_a != ArmA::A0;
        row[2] = b1;
      } else {
        row[1] = *s.arm_a == ArmA::A1;
        row[2] = *s.arm_a == ArmA::A2;
        row[3] = b1;
      }
    }
    data.design.push_row(row);
    data.outcome.push_back(s.y21);
  }
  return data;
}

std::vector<bool> closed_test(std::span<const HypothesisNode> nodes,
                              std::span<const double> p_values, double alpha) {
  if (nodes.size() != p_values.size()) {
    throw InputError("closed_test: one p-value per hypothesis required");
  }
  // Larger intersections first, so every superset is decided before its subsets.
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(nodes[a].coefficients) > std::popcount(nodes[b].coefficients);
  });
  std::vector<bool> rejected(nodes.size(), false);
  for (std::size_t i : order) {
    bool gate_open = true;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const auto mine = nodes[i].coefficients;
      const auto theirs = nodes[j].coefficients;
      const bool strict_superset = (theirs & mine) == mine && theirs != mine;
      if (strict_superset && !rejected[j]) gate_open = false;
    }
    rejected[i] = gate_open && p_values[i] < alpha;
  }
  return rejected;
}

const std::array<HypothesisNode, 7>& both_retained_hypotheses() {
  static const std::array<HypothesisNode, 7> nodes = {{
      {"H01", 0b111},
      {"H02", 0b011},
      {"H03", 0b101},
      {"H04", 0b110},
      {"H05", 0b001},
      {"H06", 0b010},
      {"H07", 0b100},
  }};
  return nodes;
}

const std::array<HypothesisNode, 3>& one_retained_hypotheses() {
  static const std::array<HypothesisNode, 3> nodes = {{
      {"global", 0b11},
      {"A_pooled", 0b01},
      {"B1", 0b10},
  }};
  return nodes;
}

std::array<bool, 7> gate_both_retained(const std::array<double, 7>& p_values, double alpha) {
  const auto flags = closed_test(both_retained_hypotheses(), p_values, alpha);
  std::array<bool, 7> out{};
  std::copy(flags.begin(), flags.end(), out.begin());
  return out;
}

namespace {

// p-values of "these coefficients are zero" for each node, by likelihood ratio.
std::vector<double> node_p_values(const FinalModelData& data,
                                  std::span<const HypothesisNode> nodes) {
  const auto grouped = GroupedBinomialData::from_rows(data.design, data.outcome);
  const LogisticFit full = fit_logistic(grouped);
  if (!full.converged) throw FittingError("full final model did not converge");
  std::vector<double> p(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<std::size_t> kept{0};
    for (std::size_t c = 1; c < data.design.cols(); ++c) {
      if (!((nodes[i].coefficients >> (c - 1)) & 1U)) kept.push_back(c);
    }
    const LogisticFit reduced = fit_logistic(grouped.select_columns(kept));
    p[i] = lr_test(full, reduced, std::popcount(nodes[i].coefficients)).p_value;
  }
  return p;
}

void require_branch(const FinalModelData& data, Branch expected) {
  if (data.spec.branch != expected) {
    throw std::logic_error("final analysis called with data built for branch " +
                           std::string(to_string(data.spec.branch)));
  }
}

}  // namespace

std::span<const HypothesisNode> hypotheses_for(Branch branch) {
  static const std::array<HypothesisNode, 1> terminated = {{{"B1", 0b1}}};
  switch (branch) {
    case Branch::one_arm_retained: return one_retained_hypotheses();
    case Branch::both_arms_retained: return both_retained_hypotheses();
    case Branch::domain_a_terminated: return terminated;
  }
  throw std::logic_error("unknown branch");
}

GatekeepingOutcome gate_from_p_values(Branch branch, std::span<const double> p_values,
                                      double alpha) {
  const auto nodes = hypotheses_for(branch);
  const auto rejected = closed_test(nodes, p_values, alpha);
  GatekeepingOutcome out;
  out.branch = branch;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.node_p_values.emplace_back(nodes[i].id, p_values[i]);
    if (rejected[i]) out.rejected.push_back(nodes[i].id);
  }
  switch (branch) {
    case Branch::one_arm_retained:
      if (out.is_rejected("A_pooled")) out.successful_arms.insert(SuccessArm::A_pooled);
      if (out.is_rejected("B1")) out.successful_arms.insert(SuccessArm::B1);
      break;
    case Branch::both_arms_retained:
      if (out.is_rejected("H05")) out.successful_arms.insert(SuccessArm::A1);
      if (out.is_rejected("H06")) out.successful_arms.insert(SuccessArm::A2);
      if (out.is_rejected("H07")) out.successful_arms.insert(SuccessArm::B1);
      break;
    case Branch::domain_a_terminated:
      if (out.is_rejected("B1")) out.successful_arms.insert(SuccessArm::B1);
      break;
  }
  return out;
}

GatekeepingOutcome gatekeep_one_retained(const FinalModelData& data, double alpha_final) {
  require_branch(data, Branch::one_arm_retained);
  const auto p = node_p_values(data, hypotheses_for(Branch::one_arm_retained));
  return gate_from_p_values(Branch::one_arm_retained, p, alpha_final);
}

GatekeepingOutcome gatekeep_both_retained(const FinalModelData& data, double alpha_final) {
  require_branch(data, Branch::both_arms_retained);
  const auto p = node_p_values(data, hypotheses_for(Branch::both_arms_retained));
  return gate_from_p_values(Branch::both_arms_retained, p, alpha_final);
}

GatekeepingOutcome analyze_terminated(const FinalModelData& data, double alpha_final) {
  require_branch(data, Branch::domain_a_terminated);
  const auto p = node_p_values(data, hypotheses_for(Branch::domain_a_terminated));
  return gate_from_p_values(Branch::domain_a_terminated, p, alpha_final);
}

GatekeepingOutcome run_final_analysis(std::span<const SubjectRecord> subjects, Branch branch,
                                      double alpha_final) {
  const FinalModelData data = build_final_model(subjects, branch);
  switch (branch) {
    case Branch::one_arm_retained: return gatekeep_one_retained(data, alpha_final);
    case Branch::both_arms_retained: return gatekeep_both_retained(data, alpha_final);
    case Branch::domain_a_terminated: return analyze_terminated(data, alpha_final);
  }
  throw std::logic_error("unknown branch");
}

}  // namespace fast
