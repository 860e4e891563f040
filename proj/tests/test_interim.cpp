#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fast/errors.hpp"
#include "fast/interim.hpp"

namespace {

using fast::ArmA;
using fast::SubjectRecord;

SubjectRecord subject(ArmA arm, double y11, double y12) {
  SubjectRecord s;
  s.arm_a = arm;
  s.y11 = y11;
  s.y12 = y12;
  return s;
}

// n subjects per arm with normal noise around the given means.
std::vector<SubjectRecord> cohort(int n, std::array<double, 3> y11_means,
                                  std::array<double, 3> y12_means, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SubjectRecord> out;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      out.push_back(subject(static_cast<ArmA>(a), y11_means[a] + noise(gen),
                            y12_means[a] + noise(gen)));
    }
  }
  return out;
}

fast::TestResult with_p(double p) {
  fast::TestResult t;
  t.p_value = p;
  return t;
}

}  // namespace

TEST_CASE("identical arms keep the default") {
  const auto subjects = cohort(30, {0, 0, 0}, {0, 0, 0}, 1);
  // Make A1 and A2 exactly equal so neither test can be significant.
  std::vector<SubjectRecord> mirrored;
  for (const auto& s : subjects) {
    if (s.arm_a == ArmA::A1) {
      mirrored.push_back(s);
      auto twin = s;
      twin.arm_a = ArmA::A2;
      mirrored.push_back(twin);
    }
  }
  for (ArmA def : {ArmA::A1, ArmA::A2}) {
    const auto d = fast::arm_dropping_analysis(mirrored, 0.05, def);
    CHECK(d.used_default);
    CHECK(d.retained == std::vector<ArmA>{def});
    CHECK(d.test_y11.p_value == 1.0);
  }
}

TEST_CASE("a clear Y11 winner is retained alone") {
  const auto subjects = cohort(40, {0, 100, 0}, {0, 0, 0}, 2);
  const auto d = fast::arm_dropping_analysis(subjects, 0.05, ArmA::A2);
  CHECK(d.nominated_by_y11 == ArmA::A1);
  CHECK(d.test_y11.p_value < 1e-10);
  CHECK(std::find(d.retained.begin(), d.retained.end(), ArmA::A1) != d.retained.end());
  CHECK_FALSE(d.used_default);
}

TEST_CASE("conflicting biomarkers retain both arms") {
  // A1 better on Y11 (higher), A2 better on Y12 (lower).
  const auto subjects = cohort(40, {0, 20, 0}, {0, 0, -20}, 3);
  const auto d = fast::arm_dropping_analysis(subjects, 0.05, ArmA::A2);
  CHECK(d.nominated_by_y11 == ArmA::A1);
  CHECK(d.nominated_by_y12 == ArmA::A2);
  CHECK(d.retains_both());
  CHECK(d.retained == std::vector<ArmA>{ArmA::A1, ArmA::A2});
}

TEST_CASE("benefit directions flip the nomination") {
  const auto subjects = cohort(40, {0, 20, 0}, {0, 0, 0}, 4);
  const auto d = fast::arm_dropping_analysis(
      subjects, 0.05, ArmA::A1, {fast::Direction::decrease, fast::Direction::decrease});
  CHECK(d.nominated_by_y11 == ArmA::A2);
}

TEST_CASE("retention rule over every significance and ordering combination") {
  for (int sig11 = 0; sig11 < 2; ++sig11) {
    for (int sig12 = 0; sig12 < 2; ++sig12) {
      for (int a1_higher_11 = 0; a1_higher_11 < 2; ++a1_higher_11) {
        for (int a1_higher_12 = 0; a1_higher_12 < 2; ++a1_higher_12) {
          for (ArmA def : {ArmA::A1, ArmA::A2}) {
            const double m11_a1 = a1_higher_11 ? 5 : 1, m11_a2 = a1_higher_11 ? 1 : 5;
            const double m12_a1 = a1_higher_12 ? 5 : 1, m12_a2 = a1_higher_12 ? 1 : 5;
            const auto d = fast::decide_retention(with_p(sig11 ? 0.01 : 0.5),
                                                  with_p(sig12 ? 0.01 : 0.5), m11_a1, m11_a2,
                                                  m12_a1, m12_a2, 0.05, def);
            std::vector<ArmA> expected;
            const ArmA y11_pick = a1_higher_11 ? ArmA::A1 : ArmA::A2;
            const ArmA y12_pick = a1_higher_12 ? ArmA::A2 : ArmA::A1;
            for (ArmA arm : {ArmA::A1, ArmA::A2}) {
              if ((sig11 && y11_pick == arm) || (sig12 && y12_pick == arm)) {
                expected.push_back(arm);
              }
            }
            if (expected.empty()) expected.push_back(def);
            CHECK(d.retained == expected);
            CHECK(d.used_default == (!sig11 && !sig12));
          }
        }
      }
    }
  }
}

TEST_CASE("p equal to alpha does not nominate") {
  const auto d = fast::decide_retention(with_p(0.05), with_p(0.05), 2, 1, 1, 2, 0.05, ArmA::A2);
  CHECK(d.used_default);
}

TEST_CASE("decisions are invariant to positive rescaling") {
  for (std::uint64_t seed = 10; seed < 40; ++seed) {
    auto subjects = cohort(25, {0, 0.5, 0}, {0, 0, -0.4}, seed);
    const auto before = fast::arm_dropping_analysis(subjects, 0.05, ArmA::A2);
    const auto feas_before = fast::feasibility_analysis(subjects, 0.05, fast::Direction::increase);
    for (auto& s : subjects) {
      s.y11 *= 3.7;
      s.y12 *= 0.25;
    }
    const auto after = fast::arm_dropping_analysis(subjects, 0.05, ArmA::A2);
    const auto feas_after = fast::feasibility_analysis(subjects, 0.05, fast::Direction::increase);
    CHECK(before.retained == after.retained);
    CHECK(before.test_y11.p_value == doctest::Approx(after.test_y11.p_value).epsilon(1e-9));
    CHECK(feas_before.proceed == feas_after.proceed);
  }
}

TEST_CASE("feasibility pools A1 and A2") {
  const auto up = cohort(50, {0, 10, 10}, {0, 0, 0}, 5);
  CHECK(fast::feasibility_analysis(up, 0.05, fast::Direction::increase).proceed);
  CHECK_FALSE(fast::feasibility_analysis(up, 0.05, fast::Direction::decrease).proceed);

  const auto flat = cohort(50, {0, 0, 0}, {0, 0, 0}, 6);
  std::vector<SubjectRecord> control_only;
  for (const auto& s : flat) {
    if (s.arm_a == ArmA::A0) control_only.push_back(s);
  }
  std::vector<SubjectRecord> mirrored = control_only;
  for (auto s : control_only) {
    s.arm_a = ArmA::A1;
    mirrored.push_back(s);
  }
  const auto tie = fast::feasibility_analysis(mirrored, 0.05, fast::Direction::increase);
  CHECK_FALSE(tie.proceed);
  CHECK(tie.test.p_value == doctest::Approx(0.5));
}

TEST_CASE("feasibility is invariant to permutation and pooled-arm relabeling") {
  std::mt19937_64 gen(7);
  auto subjects = cohort(30, {0, 1, 0.2}, {0, 0, 0}, 7);
  const auto reference = fast::feasibility_analysis(subjects, 0.05, fast::Direction::increase);
  for (int round = 0; round < 10; ++round) {
    std::shuffle(subjects.begin(), subjects.end(), gen);
    for (auto& s : subjects) {
      if (s.arm_a != ArmA::A0 && gen() % 2) s.arm_a = s.arm_a == ArmA::A1 ? ArmA::A2 : ArmA::A1;
    }
    const auto d = fast::feasibility_analysis(subjects, 0.05, fast::Direction::increase);
    CHECK(d.proceed == reference.proceed);
    CHECK(d.test.p_value == doctest::Approx(reference.test.p_value).epsilon(1e-12));
  }
}

TEST_CASE("too few subjects is a scheduling error") {
  std::vector<SubjectRecord> few{subject(ArmA::A0, 0, 0), subject(ArmA::A1, 0, 0),
                                 subject(ArmA::A2, 0, 0), subject(ArmA::A1, 1, 1)};
  CHECK_THROWS_AS(fast::arm_dropping_analysis(few, 0.05, ArmA::A2), fast::SchedulingError);
  CHECK_THROWS_AS(fast::feasibility_analysis(few, 0.05, fast::Direction::increase),
                  fast::SchedulingError);
}

TEST_CASE("schedule ordering") {
  const auto a = fast::build_schedule(150, 300);
  CHECK(a.first.kind == fast::AnalysisKind::arm_dropping);
  CHECK(a.first.trigger == 150);
  CHECK(a.second.trigger == 300);
  const auto b = fast::build_schedule(300, 90);
  CHECK(b.first.kind == fast::AnalysisKind::feasibility);
  CHECK(b.first.trigger == 90);
  const auto tie = fast::build_schedule(120, 120);
  CHECK(tie.first.kind == fast::AnalysisKind::arm_dropping);
  CHECK(tie.second.kind == fast::AnalysisKind::feasibility);
}
