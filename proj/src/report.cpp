#include "fast/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fast {

namespace {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

std::string p_value_text(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", p);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& text, const std::string& column, int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ReportError("line " + std::to_string(line) + ": column '" + column +
                      "' is not a number: '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text, const std::string& column, int line) {
  const double value = parse_double(text, column, line);
  if (value != std::floor(value)) {
    throw ReportError("line " + std::to_string(line) + ": column '" + column +
                      "' is not an integer: '" + text + "'");
  }
  return static_cast<int>(value);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 0 -> light, 1 -> dark blue.
std::string cell_colour(double value) {
  const double t = std::clamp(std::isfinite(value) ? value : 0.0, 0.0, 1.0);
  auto channel = [t](double light, double dark) {
    return static_cast<int>(std::lround(light + (dark - light) * t));
  };
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(247, 8), channel(251, 48),
                channel(255, 107));
  return buf;
}

}  // namespace

const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> columns = {
      "scenario_id",      "n_drop",          "n_feas",           "order_first",
      "p_retain_correct", "p_retain_both",   "p_proceed",        "p_success_A1",
      "p_success_A2",     "p_success_Apooled", "p_success_B1",   "p_success_A1_B1",
      "p_success_A2_B1",  "power",           "fwer",             "n_effective",
      "n_failed"};
  return columns;
}

void write_results_csv(std::ostream& out, std::span<const OperatingCharacteristics> rows) {
  const auto& columns = results_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << r.n_drop << ',' << r.n_feas << ',' << to_string(r.order_first)
        << ',' << fixed6(r.p_retain_correct) << ',' << fixed6(r.p_retain_both) << ','
        << fixed6(r.p_proceed) << ',' << fixed6(r.p_success_a1) << ',' << fixed6(r.p_success_a2)
        << ',' << fixed6(r.p_success_apooled) << ',' << fixed6(r.p_success_b1) << ','
        << fixed6(r.p_success_a1_b1) << ',' << fixed6(r.p_success_a2_b1) << ','
        << fixed6(r.power) << ',' << fixed6(r.fwer) << ',' << r.n_effective << ','
        << r.n_failed << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ReportError("results file is empty");
  const auto header = split_csv_line(trim_cr(line));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  for (const auto& column : results_columns()) {
    if (!index.contains(column)) throw ReportError("missing column '" + column + "'");
  }

  std::vector<ResultRow> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ReportError("line " + std::to_string(line_number) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    auto field = [&](const char* name) -> const std::string& { return fields[index.at(name)]; };
    ResultRow row;
    row.scenario_id = field("scenario_id");
    row.n_drop = parse_int(field("n_drop"), "n_drop", line_number);
    row.n_feas = parse_int(field("n_feas"), "n_feas", line_number);
    row.order_first = field("order_first");
    row.p_retain_correct = parse_double(field("p_retain_correct"), "p_retain_correct", line_number);
    row.p_proceed = parse_double(field("p_proceed"), "p_proceed", line_number);
    row.power = parse_double(field("power"), "power", line_number);
    row.fwer = parse_double(field("fwer"), "fwer", line_number);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_heatmaps_svg(std::span<const ResultRow> rows) {
  constexpr int kCell = 44;
  constexpr int kMarginLeft = 70;
  constexpr int kMarginTop = 50;
  constexpr int kPanelGap = 60;
  constexpr int kRowGap = 80;

  // Scenarios in first-appearance order.
  std::vector<std::string> scenarios;
  for (const auto& r : rows) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario_id) == scenarios.end()) {
      scenarios.push_back(r.scenario_id);
    }
  }
  struct Metric {
    const char* title;
    double ResultRow::*field;
  };
  const std::array<Metric, 3> metrics = {{{"P(retain correct arm)", &ResultRow::p_retain_correct},
                                          {"P(proceed past feasibility)", &ResultRow::p_proceed},
                                          {"Power", &ResultRow::power}}};

  // Axis values per scenario.
  struct Layout {
    std::vector<int> drops;
    std::vector<int> feases;
  };
  std::vector<Layout> layouts;
  int max_cols = 1;
  int total_height = kMarginTop;
  for (const auto& id : scenarios) {
    std::set<int> d, f;
    for (const auto& r : rows) {
      if (r.scenario_id != id) continue;
      d.insert(r.n_drop);
      f.insert(r.n_feas);
    }
    Layout layout{{d.begin(), d.end()}, {f.begin(), f.end()}};
    max_cols = std::max<int>(max_cols, static_cast<int>(layout.drops.size()));
    total_height += static_cast<int>(layout.feases.size()) * kCell + kRowGap;
    layouts.push_back(std::move(layout));
  }
  const int panel_width = max_cols * kCell;
  const int width = kMarginLeft + 3 * panel_width + 2 * kPanelGap + 30;
  const int height = std::max(total_height, kMarginTop + kRowGap);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  int y0 = kMarginTop;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& layout = layouts[s];
    const int n_rows = static_cast<int>(layout.feases.size());
    svg << "<g class=\"scenario\" data-scenario=\"" << xml_escape(scenarios[s]) << "\">\n";
    svg << "<text x=\"4\" y=\"" << y0 - 24 << "\" font-size=\"14\" font-weight=\"bold\">"
        << "Scenario " << xml_escape(scenarios[s]) << "</text>\n";
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const int x0 = kMarginLeft + static_cast<int>(m) * (panel_width + kPanelGap);
      svg << "<g class=\"heatmap\" data-metric=\"" << metrics[m].title << "\">\n";
      svg << "<text x=\"" << x0 << "\" y=\"" << y0 - 8 << "\">" << metrics[m].title
          << "</text>\n";
      for (const auto& r : rows) {
        if (r.scenario_id != scenarios[s]) continue;
        const auto col = std::find(layout.drops.begin(), layout.drops.end(), r.n_drop) -
                         layout.drops.begin();
        const auto row_from_top =
            n_rows - 1 -
            (std::find(layout.feases.begin(), layout.feases.end(), r.n_feas) - layout.feases.begin());
        const double value = r.*(metrics[m].field);
        const int x = x0 + static_cast<int>(col) * kCell;
        const int y = y0 + static_cast<int>(row_from_top) * kCell;
        svg << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
            << "\" height=\"" << kCell << "\" fill=\"" << cell_colour(value)
            << "\" stroke=\"#999\"/>";
        svg << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
            << "\" text-anchor=\"middle\" fill=\"" << (value > 0.55 ? "white" : "black")
            << "\">" << fixed3(value) << "</text>\n";
      }
      // Axes: n_drop along the bottom, n_feas down the left side.
      for (std::size_t c = 0; c < layout.drops.size(); ++c) {
        svg << "<text x=\"" << x0 + static_cast<int>(c) * kCell + kCell / 2 << "\" y=\""
            << y0 + n_rows * kCell + 14 << "\" text-anchor=\"middle\">" << layout.drops[c]
            << "</text>\n";
      }
      for (int r = 0; r < n_rows; ++r) {
        svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + (n_rows - 1 - r) * kCell + kCell / 2 + 4
            << "\" text-anchor=\"end\">" << layout.feases[static_cast<std::size_t>(r)]
            << "</text>\n";
      }
      svg << "<text x=\"" << x0 + static_cast<int>(layout.drops.size()) * kCell / 2 << "\" y=\""
          << y0 + n_rows * kCell + 30 << "\" text-anchor=\"middle\">n_drop</text>\n";
      svg << "</g>\n";
    }
    svg << "<text x=\"4\" y=\"" << y0 + n_rows * kCell / 2 << "\">n_feas</text>\n";
    svg << "</g>\n";
    y0 += n_rows * kCell + kRowGap;
  }
  svg << "</svg>\n";
  return svg.str();
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> columns = {
      "scenario_id", "replicate",     "seed",          "n_drop",       "n_feas",
      "order_first", "analyses_run",  "retained",      "used_default", "drop_p_y11",
      "drop_p_y12",  "feas_statistic", "feas_p",       "proceed",      "terminated_at",
      "branch",      "node_p_values", "rejected",      "successful_arms", "n_clamped",
      "failure"};
  return columns;
}

void write_trace_header(std::ostream& out) {
  const auto& columns = trace_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

void write_trace_row(std::ostream& out, std::string_view scenario_id, std::uint64_t replicate,
                     const TrialResult& r) {
  auto join = [](const auto& items, auto&& render) {
    std::string text;
    for (const auto& item : items) {
      if (!text.empty()) text += ';';
      text += render(item);
    }
    return text;
  };
  out << scenario_id << ',' << replicate << ',' << r.seed << ',' << r.n_drop << ',' << r.n_feas
      << ',' << to_string(r.schedule.first.kind) << ','
      << join(r.analyses_run, [](AnalysisKind k) { return std::string(to_string(k)); }) << ',';
  if (r.retention) {
    out << join(r.retention->retained, [](ArmA a) { return std::string(to_string(a)); }) << ','
        << (r.retention->used_default ? 1 : 0) << ','
        << p_value_text(r.retention->test_y11.p_value) << ','
        << p_value_text(r.retention->test_y12.p_value) << ',';
  } else {
    out << ",,,,";
  }
  if (r.feasibility) {
    out << p_value_text(r.feasibility->test.statistic) << ','
        << p_value_text(r.feasibility->test.p_value) << ',' << (r.feasibility->proceed ? 1 : 0)
        << ',';
  } else {
    out << ",,,";
  }
  out << r.domain_a_terminated_at << ',';
  if (r.failed()) {
    out << ",,,,";
  } else {
    out << to_string(r.branch) << ',';
    if (r.gatekeeping) {
      out << join(r.gatekeeping->node_p_values,
                  [](const auto& kv) { return kv.first + "=" + p_value_text(kv.second); })
          << ',' << join(r.gatekeeping->rejected, [](const std::string& s) { return s; });
    } else {
      out << ',';
    }
    out << ',' << r.successful_arms.label() << ',';
  }
  std::string failure = r.failure.value_or("");
  std::replace(failure.begin(), failure.end(), ',', ';');
  out << r.n_clamped << ',' << failure << '\n';
}

std::string config_hash(std::span<const ScenarioConfig> scenarios) {
  nlohmann::json canonical = nlohmann::json::array();
  for (const auto& s : scenarios) canonical.push_back(scenario_to_json(s));
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& [id, seed] : base_seeds) seeds[id] = seed;
  return {
      {"config_hash", config_hash},
      {"base_seeds", seeds},
      {"tool_version", tool_version},
      {"results_schema_version", kResultsSchemaVersion},
      {"started_at", started_at},
      {"finished_at", finished_at},
      {"threads", threads},
      {"replicates_effective", replicates_effective},
      {"replicates_failed", replicates_failed},
      {"clamped_draws", clamped_draws},
      {"gating_violations", gating_violations},
  };
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fast
