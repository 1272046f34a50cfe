#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "narrative/stats.hpp"

namespace narrative::report {

enum class ChartKind { Line, Violin, Pie, Bar };
std::string_view chart_kind_name(ChartKind kind);

/// Interpretation by kind:
///   line   - polyline through (x[i], y[i])
///   violin - y holds one sample; x is ignored
///   pie    - single series, y[i] is the weight of categories[i]
///   bar    - y[i] is the bar height for categories[i]; series are grouped
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  ChartKind kind = ChartKind::Line;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<std::string> categories;
  /// SVG path; the data CSV goes next to it with a .csv extension.
  std::filesystem::path output;

  /// Throws InputError on empty series, mismatched lengths or negative pie weights.
  void validate() const;
};

struct PieWedge {
  std::string label;
  double value = 0;
  double start_deg = 0;
  double sweep_deg = 0;
};

/// Wedge angles proportional to the weights, starting at 0 degrees.
std::vector<PieWedge> pie_wedges(const ChartSpec& spec);

struct ViolinBand {
  std::string label;
  stats::Quartiles quartiles;
};

/// Quartile band per series (nearest-rank q1/q3).
std::vector<ViolinBand> violin_bands(const ChartSpec& spec);

/// Deterministic SVG document.
std::string render_svg(const ChartSpec& spec);

/// Data table behind the chart.
void write_chart_csv(std::ostream& out, const ChartSpec& spec);

/// Writes the SVG to spec.output and the CSV beside it; returns the SVG.
std::string render_chart(const ChartSpec& spec);

}  // namespace narrative::report
