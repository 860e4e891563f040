// Command-line front end: `simulate` runs timing grids for the scenarios in a
// JSON file; `report` renders results.csv as SVG heatmaps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fast/errors.hpp"
#include "fast/report.hpp"
#include "fast/simulation.hpp"
#include "fast/trial_model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool trace = false;
};

struct ReportArgs {
  std::string in;
  std::string svg;
};

unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FAST_TRIALS_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable FAST_TRIALS_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out.flush());
}

int simulate(const SimulateArgs& args) {
  std::vector<fast::ScenarioConfig> scenarios;
  try {
    scenarios = fast::load_scenarios(args.config);
    std::vector<fast::ValidationIssue> issues;
    for (auto& s : scenarios) {
      if (args.replicates) s.replicates = *args.replicates;
      if (args.seed) s.base_seed = *args.seed;
      for (auto& issue : fast::validate_scenario(s)) {
        issue.field = s.scenario_id + ":" + issue.field;
        issues.push_back(std::move(issue));
      }
    }
    if (!issues.empty()) throw fast::ConfigError(std::move(issues));
  } catch (const fast::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const std::filesystem::path out_dir(args.out);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << args.out << "': " << ec.message()
              << '\n';
    return kExitIo;
  }

  fast::RunManifest manifest;
  manifest.started_at = fast::utc_timestamp();
  manifest.config_hash = fast::config_hash(scenarios);
  manifest.threads = resolve_threads(args.threads);
  const fast::RunOptions options{manifest.threads};

  std::vector<fast::OperatingCharacteristics> rows;
  try {
    for (const auto& scenario : scenarios) {
      manifest.base_seeds.emplace_back(scenario.scenario_id, scenario.base_seed);
      const auto cells = fast::run_grid(scenario, options, args.trace);
      std::ostringstream trace;
      if (args.trace) fast::write_trace_header(trace);
      for (const auto& cell : cells) {
        const auto& oc = cell.characteristics;
        manifest.replicates_effective += oc.n_effective;
        manifest.replicates_failed += oc.n_failed;
        manifest.clamped_draws += oc.n_clamped;
        manifest.gating_violations += oc.gating_violations;
        rows.push_back(oc);
        for (std::size_t i = 0; i < cell.replicates.size(); ++i) {
          fast::write_trace_row(trace, scenario.scenario_id, i, cell.replicates[i]);
        }
      }
      if (args.trace &&
          !write_file(out_dir / ("trace_" + scenario.scenario_id + ".csv"), trace.str())) {
        std::cerr << "error: cannot write trace file for scenario " << scenario.scenario_id
                  << '\n';
        return kExitIo;
      }
    }
  } catch (const fast::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: simulation failed: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::ostringstream csv;
  fast::write_results_csv(csv, rows);
  if (!write_file(out_dir / "results.csv", csv.str())) {
    std::cerr << "error: cannot write results.csv\n";
    return kExitIo;
  }
  manifest.finished_at = fast::utc_timestamp();
  if (!write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n")) {
    std::cerr << "error: cannot write manifest.json\n";
    return kExitIo;
  }
  std::cout << "wrote " << rows.size() << " cells to " << (out_dir / "results.csv").string()
            << '\n';
  return kExitOk;
}

int report(const ReportArgs& args) {
  std::ifstream in(args.in);
  if (!in) {
    std::cerr << "error: cannot open '" << args.in << "'\n";
    return kExitIo;
  }
  std::vector<fast::ResultRow> rows;
  try {
    rows = fast::read_results_csv(in);
  } catch (const fast::ReportError& e) {
    std::cerr << "error: " << args.in << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  if (!write_file(args.svg, fast::render_heatmaps_svg(rows))) {
    std::cerr << "error: cannot write '" << args.svg << "'\n";
    return kExitIo;
  }
  std::cout << "wrote " << args.svg << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo operating characteristics for seamless Phase II/III factorial "
               "adaptive trials"};
  app.set_version_flag("--version", std::string(fast::kToolVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the timing grid for each scenario");
  simulate_cmd->add_option("--config", sim.config, "Scenario JSON file")->required();
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();
  simulate_cmd->add_option("--replicates", sim.replicates, "Override replicates per cell");
  simulate_cmd->add_option("--seed", sim.seed, "Override base seed");
  simulate_cmd->add_option("--threads", sim.threads,
                           "Worker threads (0 = all cores; env FAST_TRIALS_THREADS)");
  simulate_cmd->add_flag("--trace", sim.trace, "Write one trace row per replicate");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Render results.csv as SVG heatmaps");
  report_cmd->add_option("--in", rep.in, "results.csv")->required();
  report_cmd->add_option("--svg", rep.svg, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (*simulate_cmd) return simulate(sim);
  return report(rep);
}
