#include "fast/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "fast/errors.hpp"
#include "fast/patient_generator.hpp"
#include "fast/rng.hpp"

namespace fast {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_trigger(const ScenarioConfig& config, const char* name, int trigger) {
  if (trigger < 1 || trigger > config.n_total) {
    throw ConfigError(name, "trigger " + std::to_string(trigger) + " outside [1, n_total=" +
                                std::to_string(config.n_total) + "]");
  }
}

}  // namespace

std::uint64_t scenario_key(std::string_view scenario_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scenario_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t scenario_id, int n_drop,
                          int n_feas, std::uint64_t replicate) {
  std::uint64_t h = mix64(base_seed + kGolden);
  h = mix64(h + scenario_id * kGolden);
  h = mix64(h + static_cast<std::uint64_t>(static_cast<std::uint32_t>(n_drop)) * kGolden);
  h = mix64(h + static_cast<std::uint64_t>(static_cast<std::uint32_t>(n_feas)) * kGolden);
  return mix64(h + replicate * kGolden);
}

ReplicateRun simulate_replicate(const ScenarioConfig& config, int n_drop, int n_feas,
                                std::uint64_t replicate_seed) {
  check_trigger(config, "n_drop", n_drop);
  check_trigger(config, "n_feas", n_feas);

  ReplicateRun run;
  TrialResult& r = run.result;
  r.n_drop = n_drop;
  r.n_feas = n_feas;
  r.seed = replicate_seed;
  r.schedule = build_schedule(n_drop, n_feas);

  Rng rng(replicate_seed);
  ActiveArms active;
  const BiomarkerDirections directions{config.y11_benefit, config.y12_benefit};
  auto& subjects = run.subjects;
  subjects.reserve(static_cast<std::size_t>(config.n_total));

  const std::array<AnalysisSchedule::Slot, 2> slots{r.schedule.first, r.schedule.second};
  std::size_t next_slot = 0;

  try {
    for (int i = 1; i <= config.n_total; ++i) {
      bool clamped = false;
      subjects.push_back(generate_subject(i, active, config, rng, &clamped));
      if (clamped) ++r.n_clamped;

      while (next_slot < slots.size() && slots[next_slot].trigger == i) {
        const AnalysisKind kind = slots[next_slot++].kind;
        if (active.domain_a_terminated()) continue;
        r.analyses_run.push_back(kind);
        if (kind == AnalysisKind::arm_dropping) {
          r.retention = arm_dropping_analysis(subjects, config.alpha_drop,
                                              config.default_retained_arm, directions);
          active.retain_only(r.retention->retained);
        } else {
          r.feasibility = feasibility_analysis(subjects, config.alpha_feas, config.y11_benefit);
          if (!r.feasibility->proceed) {
            active.terminate_domain_a();
            r.domain_a_terminated_at = i;
          }
        }
      }
    }
    r.branch = select_branch(r.retention, r.feasibility);
    r.gatekeeping = run_final_analysis(subjects, r.branch, config.alpha_final);
    r.successful_arms = r.gatekeeping->successful_arms;
  } catch (const SchedulingError& e) {
    r.failure = std::string("scheduling: ") + e.what();
  } catch (const FittingError& e) {
    r.failure = std::string("fitting: ") + e.what();
  } catch (const InputError& e) {
    // Rank-deficient final design, e.g. an arm with no subjects.
    r.failure = std::string("model: ") + e.what();
  }
  return run;
}

TrialResult run_replicate(const ScenarioConfig& config, int n_drop, int n_feas,
                          std::uint64_t replicate_seed) {
  return simulate_replicate(config, n_drop, n_feas, replicate_seed).result;
}

std::vector<ArmA> correct_retention(const ScenarioConfig& config) {
  auto beneficial = [](double shift, Direction direction) {
    return direction == Direction::increase ? shift > 0.0 : shift < 0.0;
  };
  std::vector<ArmA> effective;
  for (ArmA arm : {ArmA::A1, ArmA::A2}) {
    const BiomarkerShift s = config.biomarker_shift(arm);
    if (beneficial(s.y11, config.y11_benefit) && beneficial(s.y12, config.y12_benefit)) {
      effective.push_back(arm);
    }
  }
  if (effective.size() == 1) return effective;
  return {config.default_retained_arm};
}

bool violates_gating(const GatekeepingOutcome& outcome) {
  const auto nodes = hypotheses_for(outcome.branch);
  for (const auto& node : nodes) {
    if (!outcome.is_rejected(node.id)) continue;
    for (const auto& ancestor : nodes) {
      const bool strict_superset = (ancestor.coefficients & node.coefficients) == node.coefficients &&
                                   ancestor.coefficients != node.coefficients;
      if (strict_superset && !outcome.is_rejected(ancestor.id)) return true;
    }
  }
  return false;
}

OperatingCharacteristics summarize_cell(const ScenarioConfig& config, int n_drop, int n_feas,
                                        std::span<const TrialResult> results) {
  OperatingCharacteristics oc;
  oc.scenario_id = config.scenario_id;
  oc.n_drop = n_drop;
  oc.n_feas = n_feas;
  oc.order_first = build_schedule(n_drop, n_feas).first.kind;

  const auto& rd = config.phase3_effects;
  const bool a1_effective = rd.a1 != 0.0;
  const bool a2_effective = rd.a2 != 0.0;
  const bool pooled_effective = a1_effective || a2_effective;
  const bool b1_effective = rd.b1 != 0.0;
  const bool any_effective = pooled_effective || b1_effective;
  const std::vector<ArmA> correct = correct_retention(config);

  long retain_correct = 0, retain_both = 0, proceed = 0;
  long s_a1 = 0, s_a2 = 0, s_pooled = 0, s_b1 = 0, s_a1b1 = 0, s_a2b1 = 0;
  long power_hits = 0, fwer_hits = 0;

  for (const auto& r : results) {
    oc.n_clamped += r.n_clamped;
    if (r.failed()) {
      ++oc.n_failed;
      continue;
    }
    ++oc.n_effective;
    if (r.retention) {
      ++oc.n_arm_dropping_run;
      if (r.retention->retained == correct) ++retain_correct;
      if (r.retention->retains_both()) ++retain_both;
    }
    if (r.feasibility && r.feasibility->proceed) ++proceed;
    switch (r.branch) {
      case Branch::one_arm_retained: ++oc.n_one_arm_retained; break;
      case Branch::both_arms_retained: ++oc.n_both_arms_retained; break;
      case Branch::domain_a_terminated: ++oc.n_domain_a_terminated; break;
    }
    if (r.gatekeeping && violates_gating(*r.gatekeeping)) ++oc.gating_violations;

    const SuccessSet& s = r.successful_arms;
    const bool a1 = s.contains(SuccessArm::A1);
    const bool a2 = s.contains(SuccessArm::A2);
    const bool pooled = s.contains(SuccessArm::A_pooled);
    const bool b1 = s.contains(SuccessArm::B1);
    s_a1 += a1;
    s_a2 += a2;
    s_pooled += pooled;
    s_b1 += b1;
    s_a1b1 += a1 && b1;
    s_a2b1 += a2 && b1;

    const bool null_declared = (a1 && !a1_effective) || (a2 && !a2_effective) ||
                               (pooled && !pooled_effective) || (b1 && !b1_effective);
    fwer_hits += null_declared;

    const bool domain_a_detected =
        (a1 && a1_effective) || (a2 && a2_effective) || (pooled && pooled_effective);
    const bool detected = any_effective && (!pooled_effective || domain_a_detected) &&
                          (!b1_effective || (b1 && b1_effective));
    power_hits += detected;
  }

  if (oc.n_effective > 0) {
    const double n = oc.n_effective;
    oc.p_retain_correct = retain_correct / n;
    oc.p_retain_both = retain_both / n;
    oc.p_proceed = proceed / n;
    oc.p_success_a1 = s_a1 / n;
    oc.p_success_a2 = s_a2 / n;
    oc.p_success_apooled = s_pooled / n;
    oc.p_success_b1 = s_b1 / n;
    oc.p_success_a1_b1 = s_a1b1 / n;
    oc.p_success_a2_b1 = s_a2b1 / n;
    oc.power = power_hits / n;
    oc.fwer = fwer_hits / n;
  }
  oc.n_proceed = static_cast<int>(proceed);
  return oc;
}

std::vector<TrialResult> run_cell_replicates(const ScenarioConfig& config, int n_drop,
                                             int n_feas, const RunOptions& options) {
  if (auto issues = validate_scenario(config); !issues.empty()) {
    throw ConfigError(std::move(issues));
  }
  check_trigger(config, "n_drop", n_drop);
  check_trigger(config, "n_feas", n_feas);

  const auto count = static_cast<std::size_t>(config.replicates);
  const std::uint64_t scenario = scenario_key(config.scenario_id);
  std::vector<TrialResult> results(count);

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<unsigned>(threads, 1U, static_cast<unsigned>(count));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < count; i = next++) {
        results[i] = run_replicate(config, n_drop, n_feas,
                                   derive_seed(config.base_seed, scenario, n_drop, n_feas, i));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = count;
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

OperatingCharacteristics run_cell(const ScenarioConfig& config, int n_drop, int n_feas,
                                  const RunOptions& options) {
  const auto results = run_cell_replicates(config, n_drop, n_feas, options);
  return summarize_cell(config, n_drop, n_feas, results);
}

std::vector<CellResult> run_grid(const ScenarioConfig& config, const RunOptions& options,
                                 bool keep_replicates) {
  const ScenarioConfig checked = validated(config);
  std::set<int> drops(checked.n_drop_grid.begin(), checked.n_drop_grid.end());
  std::set<int> feases(checked.n_feas_grid.begin(), checked.n_feas_grid.end());

  std::vector<CellResult> cells;
  std::vector<std::uint64_t> seeds;
  seeds.reserve(drops.size() * feases.size() * static_cast<std::size_t>(checked.replicates));
  for (int n_drop : drops) {
    for (int n_feas : feases) {
      auto results = run_cell_replicates(checked, n_drop, n_feas, options);
      for (const auto& r : results) seeds.push_back(r.seed);
      CellResult cell;
      cell.characteristics = summarize_cell(checked, n_drop, n_feas, results);
      if (keep_replicates) cell.replicates = std::move(results);
      cells.push_back(std::move(cell));
    }
  }
  std::sort(seeds.begin(), seeds.end());
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) {
    throw std::logic_error("derived replicate seeds collided within a grid run");
  }
  return cells;
}

}  // namespace fast
