#include "fast/patient_generator.hpp"

#include <algorithm>
#include <stdexcept>

namespace fast {

std::vector<ArmA> ActiveArms::domain_a() const {
  std::vector<ArmA> arms;
  if (terminated_) return arms;
  for (ArmA arm : {ArmA::A0, ArmA::A1, ArmA::A2}) {
    if (open_[static_cast<std::size_t>(arm)]) arms.push_back(arm);
  }
  return arms;
}

void ActiveArms::retain_only(const std::vector<ArmA>& retained) {
  std::array<bool, 3> next{true, false, false};
  for (ArmA arm : retained) {
    if (arm == ArmA::A0) throw std::logic_error("retain_only: control is always retained");
    next[static_cast<std::size_t>(arm)] = true;
  }
  if (!next[1] && !next[2]) throw std::logic_error("retain_only: no treatment arm retained");
  open_ = next;
}

bool ActiveArms::valid() const noexcept {
  return terminated_ || (open_[0] && (open_[1] || open_[2]));
}

Assignment randomize_subject(Rng& rng, const ActiveArms& active) {
  Assignment out;
  if (!active.domain_a_terminated()) {
    const auto arms = active.domain_a();
    out.arm_a = arms[rng.uniform_index(arms.size())];
  }
  out.arm_b = rng.uniform_index(2) == 0 ? ArmB::B0 : ArmB::B1;
  return out;
}

Biomarkers generate_biomarkers(std::optional<ArmA> arm_a, const ScenarioConfig& config,
                               Rng& rng) {
  const BiomarkerShift shift = config.biomarker_shift(arm_a);
  Biomarkers out;
  out.y11 = rng.normal(shift.y11, config.biomarker_sds.y11);
  out.y12 = rng.normal(shift.y12, config.biomarker_sds.y12);
  return out;
}

Phase3Draw generate_phase3_outcome(std::optional<ArmA> arm_a, ArmB arm_b,
                                   const ScenarioConfig& config, Rng& rng) {
  const double raw = config.event_probability(arm_a, arm_b);
  Phase3Draw draw;
  draw.probability = std::clamp(raw, kMinEventProbability, kMaxEventProbability);
  draw.clamped = draw.probability != raw;
  draw.y21 = static_cast<std::uint8_t>(rng.bernoulli(draw.probability));
  return draw;
}

SubjectRecord generate_subject(int index, const ActiveArms& active,
                               const ScenarioConfig& config, Rng& rng, bool* clamped) {
  SubjectRecord subject;
  subject.index = index;
  const Assignment assignment = randomize_subject(rng, active);
  subject.arm_a = assignment.arm_a;
  subject.arm_b = assignment.arm_b;
  const Biomarkers markers = generate_biomarkers(subject.arm_a, config, rng);
  subject.y11 = markers.y11;
  subject.y12 = markers.y12;
  const Phase3Draw outcome = generate_phase3_outcome(subject.arm_a, subject.arm_b, config, rng);
  subject.y21 = outcome.y21;
  if (clamped) *clamped = outcome.clamped;
  return subject;
}

}  // namespace fast
