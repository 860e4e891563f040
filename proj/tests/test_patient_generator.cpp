#include <doctest.h>

#include <cmath>

#include "fast/patient_generator.hpp"

namespace {

// Count within three binomial standard errors of n * p.
bool near_expected(long count, long n, double p) {
  return std::fabs(count - n * p) <= 3.0 * std::sqrt(n * p * (1 - p));
}

}  // namespace

TEST_CASE("equal allocation across all arms") {
  fast::Rng rng(100);
  const fast::ActiveArms active;
  const long n = 300000;
  long a[3] = {0, 0, 0}, b1 = 0;
  for (long i = 0; i < n; ++i) {
    const auto s = fast::randomize_subject(rng, active);
    REQUIRE(s.arm_a.has_value());
    ++a[static_cast<int>(*s.arm_a)];
    b1 += s.arm_b == fast::ArmB::B1;
  }
  for (long count : a) CHECK(near_expected(count, n, 1.0 / 3));
  CHECK(near_expected(b1, n, 0.5));
}

TEST_CASE("dropped arm is never assigned") {
  fast::Rng rng(101);
  fast::ActiveArms active;
  active.retain_only({fast::ArmA::A2});
  CHECK(active.valid());
  CHECK(active.domain_a() == std::vector<fast::ArmA>{fast::ArmA::A0, fast::ArmA::A2});
  const long n = 100000;
  long a0 = 0;
  for (long i = 0; i < n; ++i) {
    const auto s = fast::randomize_subject(rng, active);
    REQUIRE(s.arm_a.has_value());
    CHECK(*s.arm_a != fast::ArmA::A1);
    a0 += *s.arm_a == fast::ArmA::A0;
  }
  CHECK(near_expected(a0, n, 0.5));
}

TEST_CASE("terminated Domain A assigns Domain B only") {
  fast::Rng rng(102);
  fast::ActiveArms active;
  active.terminate_domain_a();
  CHECK(active.domain_a().empty());
  CHECK(active.valid());
  const long n = 100000;
  long b1 = 0;
  for (long i = 0; i < n; ++i) {
    const auto s = fast::randomize_subject(rng, active);
    CHECK_FALSE(s.arm_a.has_value());
    b1 += s.arm_b == fast::ArmB::B1;
  }
  CHECK(near_expected(b1, n, 0.5));
}

TEST_CASE("biomarker means follow the configured shifts") {
  fast::ScenarioConfig c;
  c.effect_a1 = {-10.0, 4.0};
  fast::Rng rng(103);
  const int n = 100000;
  double s11 = 0, s12 = 0, c11 = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const auto b = fast::generate_biomarkers(fast::ArmA::A1, c, rng);
    s11 += b.y11;
    s12 += b.y12;
    const auto control = fast::generate_biomarkers(fast::ArmA::A0, c, rng);
    c11 += control.y11;
    sq += control.y11 * control.y11;
  }
  const double se = 10.0 / std::sqrt(n);
  CHECK(std::fabs(s11 / n + 10.0) < 3 * se);
  CHECK(std::fabs(s12 / n - 4.0) < 3 * se);
  CHECK(std::fabs(c11 / n) < 3 * se);
  CHECK(std::fabs(std::sqrt(sq / n) - 10.0) < 0.1);
}

TEST_CASE("zero sd gives the mean exactly") {
  fast::ScenarioConfig c;
  c.biomarker_sds = {0.0, 0.0};
  c.effect_a2 = {3.0, -2.0};
  fast::Rng rng(104);
  const auto b = fast::generate_biomarkers(fast::ArmA::A2, c, rng);
  CHECK(b.y11 == 3.0);
  CHECK(b.y12 == -2.0);
  const auto none = fast::generate_biomarkers(std::nullopt, c, rng);
  CHECK(none.y11 == 0.0);
}

TEST_CASE("phase III event rates") {
  fast::ScenarioConfig c;
  c.phase3_effects = {0.0, 0.1, 0.1};
  fast::Rng rng(105);
  const long n = 100000;
  long control = 0, treated = 0;
  for (long i = 0; i < n; ++i) {
    control += fast::generate_phase3_outcome(fast::ArmA::A0, fast::ArmB::B0, c, rng).y21;
    const auto draw = fast::generate_phase3_outcome(fast::ArmA::A2, fast::ArmB::B1, c, rng);
    CHECK(draw.probability == doctest::Approx(0.6));
    CHECK_FALSE(draw.clamped);
    treated += draw.y21;
  }
  CHECK(near_expected(control, n, 0.4));
  CHECK(near_expected(treated, n, 0.6));
}

TEST_CASE("global null gives identical probabilities and out-of-range values clamp") {
  fast::ScenarioConfig c;
  fast::Rng rng(106);
  for (auto a : {fast::ArmA::A0, fast::ArmA::A1, fast::ArmA::A2}) {
    for (auto b : {fast::ArmB::B0, fast::ArmB::B1}) {
      CHECK(fast::generate_phase3_outcome(a, b, c, rng).probability == 0.4);
    }
  }
  c.control_event_rate = 0.0005;
  const auto low = fast::generate_phase3_outcome(fast::ArmA::A0, fast::ArmB::B0, c, rng);
  CHECK(low.clamped);
  CHECK(low.probability == fast::kMinEventProbability);
  c.control_event_rate = 0.9;
  c.phase3_effects.b1 = 0.2;
  const auto high = fast::generate_phase3_outcome(fast::ArmA::A0, fast::ArmB::B1, c, rng);
  CHECK(high.clamped);
  CHECK(high.probability == fast::kMaxEventProbability);
}

TEST_CASE("subject generation is deterministic in the stream") {
  fast::ScenarioConfig c;
  c.effect_a1 = {1.0, 2.0};
  fast::ActiveArms active;
  fast::Rng r1(107), r2(107);
  for (int i = 1; i <= 500; ++i) {
    const auto s1 = fast::generate_subject(i, active, c, r1);
    const auto s2 = fast::generate_subject(i, active, c, r2);
    CHECK(s1 == s2);
    CHECK(s1.index == i);
  }
}
