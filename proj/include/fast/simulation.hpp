#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fast/final_analysis.hpp"
#include "fast/interim.hpp"
#include "fast/trial_model.hpp"

namespace fast {

// One replicate's path through the design.
struct TrialResult {
  int n_drop = 0;
  int n_feas = 0;
  std::uint64_t seed = 0;
  AnalysisSchedule schedule;
  std::vector<AnalysisKind> analyses_run;  // execution order
  std::optional<RetentionDecision> retention;
  std::optional<FeasibilityDecision> feasibility;
  int domain_a_terminated_at = 0;  // enrollment count at termination, 0 if never
  Branch branch = Branch::both_arms_retained;
  std::optional<GatekeepingOutcome> gatekeeping;
  SuccessSet successful_arms;
  int n_clamped = 0;
  // Set when the replicate could not be analyzed (non-convergent fit, too few
  // subjects for an interim test). Failed replicates are excluded from every
  // operating characteristic and counted separately.
  std::optional<std::string> failure;

  bool failed() const { return failure.has_value(); }
};

struct ReplicateRun {
  TrialResult result;
  std::vector<SubjectRecord> subjects;
};

/// Enrolls n_total subjects, running each interim analysis when its trigger
/// count is reached, then the branch-appropriate final analysis. Fully
/// determined by its arguments. Throws ConfigError for triggers outside
/// [1, n_total].
ReplicateRun simulate_replicate(const ScenarioConfig& config, int n_drop, int n_feas,
                                std::uint64_t replicate_seed);
TrialResult run_replicate(const ScenarioConfig& config, int n_drop, int n_feas,
                          std::uint64_t replicate_seed);

/// FNV-1a hash of a scenario label; the scenario component of derive_seed.
std::uint64_t scenario_key(std::string_view scenario_id);

/// Per-replicate seed. For fixed (base, scenario, cell) the map from
/// replicate index to seed is a bijection, and for fixed indices the map from
/// base_seed to seed is a bijection.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t scenario_id, int n_drop,
                          int n_feas, std::uint64_t replicate);

struct OperatingCharacteristics {
  std::string scenario_id;
  int n_drop = 0;
  int n_feas = 0;
  AnalysisKind order_first = AnalysisKind::arm_dropping;
  double p_retain_correct = 0.0;
  double p_retain_both = 0.0;
  double p_proceed = 0.0;
  double p_success_a1 = 0.0;
  double p_success_a2 = 0.0;
  double p_success_apooled = 0.0;
  double p_success_b1 = 0.0;
  double p_success_a1_b1 = 0.0;
  double p_success_a2_b1 = 0.0;
  double power = 0.0;
  double fwer = 0.0;
  int n_effective = 0;
  int n_failed = 0;
  int n_arm_dropping_run = 0;
  int n_proceed = 0;
  int n_one_arm_retained = 0;
  int n_both_arms_retained = 0;
  int n_domain_a_terminated = 0;
  long n_clamped = 0;
  long gating_violations = 0;
};

/// Retained set counted as correct: the non-control arms whose biomarker
/// shifts are nonzero and in the benefit direction on both Y11 and Y12, or the
/// default arm when that set is empty or holds both arms.
std::vector<ArmA> correct_retention(const ScenarioConfig& config);

/// True when some singleton in `outcome` is rejected while one of its
/// ancestor intersections is not.
bool violates_gating(const GatekeepingOutcome& outcome);

/// Deterministic fold of replicate results, in the order given.
OperatingCharacteristics summarize_cell(const ScenarioConfig& config, int n_drop, int n_feas,
                                        std::span<const TrialResult> results);

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

std::vector<TrialResult> run_cell_replicates(const ScenarioConfig& config, int n_drop,
                                             int n_feas, const RunOptions& options = {});

OperatingCharacteristics run_cell(const ScenarioConfig& config, int n_drop, int n_feas,
                                  const RunOptions& options = {});

struct CellResult {
  OperatingCharacteristics characteristics;
  std::vector<TrialResult> replicates;  // filled only when requested
};

/// Every (n_drop, n_feas) cell, sorted by n_drop then n_feas. Throws
/// std::logic_error if two replicates anywhere in the run share a seed.
std::vector<CellResult> run_grid(const ScenarioConfig& config, const RunOptions& options = {},
                                 bool keep_replicates = false);

}  // namespace fast
