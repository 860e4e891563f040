#include "fast/interim.hpp"

#include <string>

#include "fast/errors.hpp"

namespace fast {

namespace {

// Arm whose mean is better in `direction`; none on an exact tie.
std::optional<ArmA> better_arm(double mean_a1, double mean_a2, Direction direction) {
  if (mean_a1 == mean_a2) return std::nullopt;
  const bool a1_higher = mean_a1 > mean_a2;
  const bool prefer_higher = direction == Direction::increase;
  return a1_higher == prefer_higher ? ArmA::A1 : ArmA::A2;
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view to_string(AnalysisKind kind) {
  return kind == AnalysisKind::arm_dropping ? "arm_dropping" : "feasibility";
}

RetentionDecision decide_retention(const TestResult& test_y11, const TestResult& test_y12,
                                   double mean_y11_a1, double mean_y11_a2,
                                   double mean_y12_a1, double mean_y12_a2,
                                   double alpha_drop, ArmA default_arm,
                                   BiomarkerDirections directions) {
  RetentionDecision d;
  d.test_y11 = test_y11;
  d.test_y12 = test_y12;
  d.mean_y11_a1 = mean_y11_a1;
  d.mean_y11_a2 = mean_y11_a2;
  d.mean_y12_a1 = mean_y12_a1;
  d.mean_y12_a2 = mean_y12_a2;
  if (test_y11.p_value < alpha_drop) {
    d.nominated_by_y11 = better_arm(mean_y11_a1, mean_y11_a2, directions.y11);
  }
  if (test_y12.p_value < alpha_drop) {
    d.nominated_by_y12 = better_arm(mean_y12_a1, mean_y12_a2, directions.y12);
  }
  for (ArmA arm : {ArmA::A1, ArmA::A2}) {
    if (d.nominated_by_y11 == arm || d.nominated_by_y12 == arm) d.retained.push_back(arm);
  }
  if (d.retained.empty()) {
    d.used_default = true;
    d.retained.push_back(default_arm);
  }
  return d;
}

RetentionDecision arm_dropping_analysis(std::span<const SubjectRecord> subjects,
                                        double alpha_drop, ArmA default_arm,
                                        BiomarkerDirections directions) {
  std::vector<double> y11_a1, y11_a2, y12_a1, y12_a2;
  for (const auto& s : subjects) {
    if (s.arm_a == ArmA::A1) {
      y11_a1.push_back(s.y11);
      y12_a1.push_back(s.y12);
    } else if (s.arm_a == ArmA::A2) {
      y11_a2.push_back(s.y11);
      y12_a2.push_back(s.y12);
    }
  }
  if (y11_a1.size() < 2 || y11_a2.size() < 2) {
    throw SchedulingError("arm-dropping analysis needs at least two subjects in each of A1 and A2 (have " +
                          std::to_string(y11_a1.size()) + " and " +
                          std::to_string(y11_a2.size()) + ")");
  }
  const TestResult t11 = welch_t_test(y11_a1, y11_a2, Tail::two_sided);
  const TestResult t12 = welch_t_test(y12_a1, y12_a2, Tail::two_sided);
  return decide_retention(t11, t12, mean(y11_a1), mean(y11_a2), mean(y12_a1),
                          mean(y12_a2), alpha_drop, default_arm, directions);
}

FeasibilityDecision feasibility_analysis(std::span<const SubjectRecord> subjects,
                                         double alpha_feas, Direction direction) {
  std::vector<double> control, pooled;
  for (const auto& s : subjects) {
    if (!s.arm_a) continue;
    if (*s.arm_a == ArmA::A0) control.push_back(s.y11);
    else pooled.push_back(s.y11);
  }
  if (control.size() < 2 || pooled.size() < 2) {
    throw SchedulingError("feasibility analysis needs at least two control and two treated subjects (have " +
                          std::to_string(control.size()) + " and " +
                          std::to_string(pooled.size()) + ")");
  }
  const Tail tail = direction == Direction::increase ? Tail::upper : Tail::lower;
  FeasibilityDecision d;
  d.test = welch_t_test(pooled, control, tail);
  d.pooled_mean = mean(pooled);
  d.control_mean = mean(control);
  d.proceed = d.test.p_value < alpha_feas;
  return d;
}

AnalysisSchedule build_schedule(int n_drop, int n_feas) {
  AnalysisSchedule s;
  const AnalysisSchedule::Slot drop{AnalysisKind::arm_dropping, n_drop};
  const AnalysisSchedule::Slot feas{AnalysisKind::feasibility, n_feas};
  if (n_drop <= n_feas) {
    s.first = drop;
    s.second = feas;
  } else {
    s.first = feas;
    s.second = drop;
  }
  return s;
}

}  // namespace fast
