#include "narrative/report/run.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "narrative/error.hpp"
#include "narrative/report/chart.hpp"
#include "narrative/text.hpp"

#ifndef NARRATIVE_VERSION
#define NARRATIVE_VERSION "0.0.0"
#endif

namespace narrative::report {

namespace fs = std::filesystem;

std::string_view toolkit_version() { return NARRATIVE_VERSION; }

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return text::sha256_hex(ss.str());
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
}

std::string write_config_snapshot(const fs::path& run_dir, const llm::json& config) {
  const std::string body = config.dump(2) + "\n";
  write_text(run_dir / "config.snapshot", body);
  return text::sha256_hex(body);
}

void write_manifest(const fs::path& run_dir, RunManifest m) {
  std::sort(m.outputs.begin(), m.outputs.end());
  m.outputs.erase(std::unique(m.outputs.begin(), m.outputs.end()), m.outputs.end());
  llm::json j = {{"command", m.command},
                 {"version", std::string(toolkit_version())},
                 {"config_hash", m.config_hash},
                 {"inputs", m.inputs},
                 {"outputs", m.outputs},
                 {"summary", m.summary}};
  j["corpus_hash"] = m.corpus_hash.empty() ? llm::json(nullptr) : llm::json(m.corpus_hash);
  write_text(run_dir / "manifest.json", j.dump(2) + "\n");
}

namespace {

std::optional<text::CsvTable> read_table(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  return text::read_csv(in);
}

std::optional<double> number(const std::string& s) {
  const std::string t = text::trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

double number_or_zero(const std::string& s) { return number(s).value_or(0.0); }

// Columns of `names` that carry a value in at least one row.
std::vector<std::size_t> populated(const text::CsvTable& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    const auto c = t.column(n);
    if (std::any_of(t.rows.begin(), t.rows.end(), [&](const auto& r) { return number(r[c]).has_value(); }))
      out.push_back(c);
  }
  return out;
}

std::optional<ChartSpec> scores_chart(const text::CsvTable& t) {
  const auto cols = populated(t, {"TP1", "TP2", "TP3", "TP4", "TP5", "Avg.", "Arc"});
  if (cols.empty() || t.rows.empty()) return std::nullopt;
  ChartSpec spec{ChartKind::Bar, "Accuracy", "", "accuracy (%)", {}, {}, {}};
  for (auto c : cols) spec.categories.push_back(t.header[c]);
  const auto c_label = t.column("label"), c_mode = t.column("mode");
  for (const auto& r : t.rows) {
    Series s{r[c_label] + " (" + r[c_mode] + ")", {}, {}};
    for (auto c : cols) s.y.push_back(number_or_zero(r[c]));
    spec.series.push_back(std::move(s));
  }
  return spec;
}

std::optional<ChartSpec> positions_chart(const text::CsvTable& t) {
  if (t.rows.empty()) return std::nullopt;
  ChartSpec spec{ChartKind::Violin, "Turning point positions", "turning point", "relative position", {}, {}, {}};
  const auto c_series = t.column("series"), c_value = t.column("value");
  for (const auto& r : t.rows) {
    auto it = std::find_if(spec.series.begin(), spec.series.end(), [&](const Series& s) { return s.label == r[c_series]; });
    if (it == spec.series.end()) {
      spec.series.push_back({r[c_series], {}, {}});
      it = spec.series.end() - 1;
    }
    it->y.push_back(number_or_zero(r[c_value]));
  }
  return spec;
}

std::optional<ChartSpec> shares_chart(const text::CsvTable& t) {
  ChartSpec spec{ChartKind::Pie, "Story arc shares", "", "", {{"count", {}, {}}}, {}, {}};
  const auto c_arc = t.column("arc"), c_count = t.column("count");
  double total = 0;
  for (const auto& r : t.rows) {
    spec.categories.push_back(r[c_arc]);
    spec.series.front().y.push_back(number_or_zero(r[c_count]));
    total += spec.series.front().y.back();
  }
  if (total <= 0) return std::nullopt;
  return spec;
}

std::optional<ChartSpec> curve_chart(const text::CsvTable& t, const std::string& dimension) {
  ChartSpec spec{ChartKind::Line, dimension + " curve", "relative position", dimension, {}, {}, {}};
  const auto c_series = t.column("series"), c_x = t.column("x"), c_v = t.column("value");
  for (const auto& r : t.rows) {
    auto it = std::find_if(spec.series.begin(), spec.series.end(), [&](const Series& s) { return s.label == r[c_series]; });
    if (it == spec.series.end()) {
      spec.series.push_back({r[c_series], {}, {}});
      it = spec.series.end() - 1;
    }
    it->x.push_back(number_or_zero(r[c_x]));
    it->y.push_back(number_or_zero(r[c_v]));
  }
  if (spec.series.empty()) return std::nullopt;
  return spec;
}

std::optional<ChartSpec> grouped_chart(const text::CsvTable& t, const std::string& title,
                                       const std::vector<std::string>& key_columns,
                                       const std::vector<std::string>& value_columns) {
  if (t.rows.empty()) return std::nullopt;
  ChartSpec spec{ChartKind::Bar, title, "", "share (%)", {}, {}, {}};
  for (const auto& v : value_columns) spec.series.push_back({v, {}, {}});
  for (const auto& r : t.rows) {
    std::vector<std::string> key;
    for (const auto& k : key_columns) key.push_back(r[t.column(k)]);
    spec.categories.push_back(text::join(key, ":"));
    for (std::size_t i = 0; i < value_columns.size(); ++i)
      spec.series[i].y.push_back(number_or_zero(r[t.column(value_columns[i])]));
  }
  return spec;
}

std::optional<ChartSpec> arc_success_chart(const text::CsvTable& t) {
  ChartSpec spec{ChartKind::Bar, "Requested arc success", "", "accuracy (%)", {{"accuracy", {}, {}}}, {}, {}};
  const auto c_arc = t.column("arc"), c_acc = t.column("accuracy");
  for (const auto& r : t.rows) {
    if (auto v = number(r[c_acc])) {
      spec.categories.push_back(r[c_arc]);
      spec.series.front().y.push_back(*v);
    }
  }
  if (spec.categories.empty()) return std::nullopt;
  return spec;
}

}  // namespace

std::vector<std::string> render_run(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw InputError("run directory " + run_dir.string() + " does not exist");
  std::vector<std::pair<std::string, std::optional<ChartSpec>>> charts;

  if (auto t = read_table(run_dir / "scores.csv")) charts.emplace_back("scores", scores_chart(*t));
  if (auto t = read_table(run_dir / "tp_positions.csv")) charts.emplace_back("tp_positions", positions_chart(*t));
  if (auto t = read_table(run_dir / "arc_shares.csv")) charts.emplace_back("arc_shares", shares_chart(*t));
  for (const std::string dim : {"arousal", "valence"}) {
    if (auto t = read_table(run_dir / (dim + "_curve.csv"))) charts.emplace_back(dim + "_curve", curve_chart(*t, dim));
  }
  if (auto t = read_table(run_dir / "ranking_table.csv"))
    charts.emplace_back("rankings", grouped_chart(*t, "Ranking shares", {"criterion", "strategy"}, {"best", "medium", "worst"}));
  if (auto t = read_table(run_dir / "pair_table.csv"))
    charts.emplace_back("pairs", grouped_chart(*t, "Pairwise verdicts", {"aspect"}, {"outline_only", "tie", "arc_enhanced"}));
  if (auto t = read_table(run_dir / "arc_success.csv")) charts.emplace_back("arc_success", arc_success_chart(*t));

  std::vector<std::string> written;
  for (auto& [name, spec] : charts) {
    if (!spec) continue;
    const std::string rel = "charts/" + name + ".svg";
    spec->output = run_dir / rel;
    render_chart(*spec);
    written.push_back(rel);
  }
  return written;
}

}  // namespace narrative::report
