#include "narrative/report/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "narrative/error.hpp"
#include "narrative/text.hpp"

namespace narrative::report {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 30, kTop = 50, kBottom = 60;
constexpr std::array<const char*, 8> kPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                 "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

std::string n2(double v) { return text::fixed(v, 2); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
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

struct Range {
  double lo = 0, hi = 1;
};

// Unit range when every value fits in [0,1]; otherwise the data span,
// widened around a constant.
Range value_range(const std::vector<double>& values) {
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn >= 0.0 && *mx <= 1.0) return {0.0, 1.0};
  Range r{*mn, *mx};
  if (r.hi - r.lo < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

class Canvas {
 public:
  explicit Canvas(const ChartSpec& spec) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" data-kind=\"" << chart_kind_name(spec.kind)
        << "\">\n";
    os_ << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    label(kWidth / 2, 28, spec.title, "middle", 16);
  }

  void label(double x, double y, std::string_view s, const char* anchor, int size = 12,
            const std::string& extra = "") {
    os_ << "<text x=\"" << n2(x) << "\" y=\"" << n2(y) << "\" text-anchor=\"" << anchor << "\" font-family=\"sans-serif\" font-size=\""
        << size << "\"" << extra << '>' << xml_escape(s) << "</text>\n";
  }

  void raw(const std::string& s) { os_ << s << '\n'; }

  void axes(const ChartSpec& spec, Range y) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    raw("<line class=\"axis\" x1=\"" + n2(x0) + "\" y1=\"" + n2(y0) + "\" x2=\"" + n2(x1) + "\" y2=\"" + n2(y0) +
        "\" stroke=\"black\"/>");
    raw("<line class=\"axis\" x1=\"" + n2(x0) + "\" y1=\"" + n2(y0) + "\" x2=\"" + n2(x0) + "\" y2=\"" + n2(y1) +
        "\" stroke=\"black\"/>");
    for (int i = 0; i <= 4; ++i) {
      const double v = y.lo + (y.hi - y.lo) * i / 4.0;
      const double py = y0 - (y0 - y1) * i / 4.0;
      raw("<line x1=\"" + n2(x0 - 4) + "\" y1=\"" + n2(py) + "\" x2=\"" + n2(x0) + "\" y2=\"" + n2(py) +
          "\" stroke=\"black\"/>");
      label(x0 - 8, py + 4, text::fixed(v, 2), "end", 10);
    }
    label((x0 + x1) / 2, kHeight - 15, spec.x_label, "middle");
    label(18, (y0 + y1) / 2, spec.y_label, "middle", 12,
         " transform=\"rotate(-90 18 " + n2((y0 + y1) / 2) + ")\"");
  }

  void legend(const std::vector<Series>& series) {
    double y = kTop + 4;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double x = kWidth - kRight - 140;
      raw("<rect x=\"" + n2(x) + "\" y=\"" + n2(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
          kPalette[i % kPalette.size()] + "\"/>");
      label(x + 14, y, series[i].label, "start", 11);
      y += 16;
    }
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

double map_y(double v, Range r) {
  const double y0 = kHeight - kBottom, y1 = kTop;
  return y0 - (v - r.lo) / (r.hi - r.lo) * (y0 - y1);
}

void render_line(Canvas& c, const ChartSpec& spec) {
  std::vector<double> xs, ys;
  for (const auto& s : spec.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Range xr = value_range(xs), yr = value_range(ys);
  c.axes(spec, yr);
  const double x0 = kLeft, x1 = kWidth - kRight;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (k) pts += ' ';
      pts += n2(x0 + (s.x[k] - xr.lo) / (xr.hi - xr.lo) * (x1 - x0)) + ',' + n2(map_y(s.y[k], yr));
    }
    c.raw("<polyline class=\"series\" data-label=\"" + xml_escape(s.label) + "\" fill=\"none\" stroke=\"" +
          kPalette[i % kPalette.size()] + "\" stroke-width=\"2\" points=\"" + pts + "\"/>");
  }
  c.label(x0, kHeight - kBottom + 16, text::fixed(xr.lo, 2), "middle", 10);
  c.label(x1, kHeight - kBottom + 16, text::fixed(xr.hi, 2), "middle", 10);
  c.legend(spec.series);
}

void render_violin(Canvas& c, const ChartSpec& spec) {
  std::vector<double> all;
  for (const auto& s : spec.series) all.insert(all.end(), s.y.begin(), s.y.end());
  const Range yr = value_range(all);
  c.axes(spec, yr);
  const auto bands = violin_bands(spec);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    const auto& q = b.quartiles;
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(slot * 0.3, 40.0);
    const char* color = kPalette[i % kPalette.size()];
    c.raw("<g class=\"violin\" data-label=\"" + xml_escape(b.label) + "\">");
    c.raw("<line class=\"range\" data-min=\"" + text::fixed(q.min, 6) + "\" data-max=\"" + text::fixed(q.max, 6) +
          "\" x1=\"" + n2(cx) + "\" y1=\"" + n2(map_y(q.min, yr)) + "\" x2=\"" + n2(cx) + "\" y2=\"" +
          n2(map_y(q.max, yr)) + "\" stroke=\"" + color + "\"/>");
    c.raw("<rect class=\"iqr\" data-q1=\"" + text::fixed(q.q1, 6) + "\" data-q3=\"" + text::fixed(q.q3, 6) +
          "\" x=\"" + n2(cx - half) + "\" y=\"" + n2(map_y(q.q3, yr)) + "\" width=\"" + n2(2 * half) +
          "\" height=\"" + n2(map_y(q.q1, yr) - map_y(q.q3, yr)) + "\" fill=\"" + color +
          "\" fill-opacity=\"0.5\" stroke=\"" + color + "\"/>");
    c.raw("<line class=\"median\" data-value=\"" + text::fixed(q.median, 6) + "\" x1=\"" + n2(cx - half) +
          "\" y1=\"" + n2(map_y(q.median, yr)) + "\" x2=\"" + n2(cx + half) + "\" y2=\"" +
          n2(map_y(q.median, yr)) + "\" stroke=\"black\" stroke-width=\"2\"/>");
    c.raw("</g>");
    c.label(cx, kHeight - kBottom + 16, b.label, "middle", 11);
  }
}

void render_pie(Canvas& c, const ChartSpec& spec) {
  const double cx = kWidth / 2 - 60, cy = kHeight / 2 + 15, r = 140;
  const auto wedges = pie_wedges(spec);
  const auto point = [&](double deg) {
    const double rad = (deg - 90.0) * std::numbers::pi / 180.0;
    return n2(cx + r * std::cos(rad)) + ',' + n2(cy + r * std::sin(rad));
  };
  for (std::size_t i = 0; i < wedges.size(); ++i) {
    const auto& w = wedges[i];
    const std::string attrs = "class=\"wedge\" data-label=\"" + xml_escape(w.label) + "\" data-start=\"" +
                              text::fixed(w.start_deg, 4) + "\" data-sweep=\"" + text::fixed(w.sweep_deg, 4) +
                              "\" fill=\"" + kPalette[i % kPalette.size()] + "\" stroke=\"white\"";
    if (w.sweep_deg <= 0) continue;
    if (w.sweep_deg >= 360.0 - 1e-9) {
      c.raw("<circle " + attrs + " cx=\"" + n2(cx) + "\" cy=\"" + n2(cy) + "\" r=\"" + n2(r) + "\"/>");
      continue;
    }
    const int large = w.sweep_deg > 180.0 ? 1 : 0;
    c.raw("<path " + attrs + " d=\"M" + n2(cx) + ',' + n2(cy) + " L" + point(w.start_deg) + " A" + n2(r) + ',' +
          n2(r) + " 0 " + std::to_string(large) + ",1 " + point(w.start_deg + w.sweep_deg) + " Z\"/>");
  }
  std::vector<Series> legend;
  double total = 0;
  for (const auto& w : wedges) total += w.value;
  for (const auto& w : wedges)
    legend.push_back({w.label + " (" + text::fixed(100.0 * w.value / total, 1) + "%)", {}, {}});
  c.legend(legend);
}

void render_bar(Canvas& c, const ChartSpec& spec) {
  std::vector<double> all = {0.0};
  for (const auto& s : spec.series) all.insert(all.end(), s.y.begin(), s.y.end());
  Range yr = value_range(all);
  if (yr.lo > 0) yr.lo = 0;
  c.axes(spec, yr);
  const double group = (kWidth - kLeft - kRight) / static_cast<double>(spec.categories.size());
  const double bar = group * 0.8 / static_cast<double>(spec.series.size());
  for (std::size_t k = 0; k < spec.categories.size(); ++k) {
    const double gx = kLeft + group * static_cast<double>(k) + group * 0.1;
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
      const double v = spec.series[i].y[k];
      const double top = map_y(std::max(v, 0.0), yr), base = map_y(std::min(v, 0.0), yr);
      c.raw("<rect class=\"bar\" data-series=\"" + xml_escape(spec.series[i].label) + "\" data-category=\"" +
            xml_escape(spec.categories[k]) + "\" data-value=\"" + text::fixed(v, 6) + "\" x=\"" +
            n2(gx + bar * static_cast<double>(i)) + "\" y=\"" + n2(top) + "\" width=\"" + n2(bar) + "\" height=\"" +
            n2(base - top) + "\" fill=\"" + kPalette[i % kPalette.size()] + "\"/>");
    }
    c.label(gx + group * 0.4, kHeight - kBottom + 16, spec.categories[k], "middle", 10);
  }
  c.legend(spec.series);
}

}  // namespace

std::string_view chart_kind_name(ChartKind kind) {
  switch (kind) {
    case ChartKind::Line: return "line";
    case ChartKind::Violin: return "violin";
    case ChartKind::Pie: return "pie";
    case ChartKind::Bar: return "bar";
  }
  return "line";
}

void ChartSpec::validate() const {
  if (series.empty()) throw InputError("chart '" + title + "' has no series");
  for (const auto& s : series) {
    if (s.y.empty()) throw InputError("chart '" + title + "': series '" + s.label + "' is empty");
    for (double v : s.y)
      if (!std::isfinite(v)) throw InputError("chart '" + title + "': non-finite value in '" + s.label + "'");
    switch (kind) {
      case ChartKind::Line:
        if (s.x.size() != s.y.size()) throw InputError("chart '" + title + "': x/y length mismatch in '" + s.label + "'");
        break;
      case ChartKind::Pie:
      case ChartKind::Bar:
        if (s.y.size() != categories.size())
          throw InputError("chart '" + title + "': series '" + s.label + "' does not match the categories");
        break;
      case ChartKind::Violin:
        break;
    }
  }
  if (kind == ChartKind::Pie) {
    if (series.size() != 1) throw InputError("pie chart takes exactly one series");
    double total = 0;
    for (double v : series.front().y) {
      if (v < 0) throw InputError("pie chart '" + title + "' has a negative weight");
      total += v;
    }
    if (total <= 0) throw InputError("pie chart '" + title + "' has zero total weight");
  }
}

std::vector<PieWedge> pie_wedges(const ChartSpec& spec) {
  spec.validate();
  if (spec.kind != ChartKind::Pie) throw InputError("pie_wedges needs a pie chart");
  const auto& y = spec.series.front().y;
  double total = 0;
  for (double v : y) total += v;
  std::vector<PieWedge> out;
  double start = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sweep = 360.0 * y[i] / total;
    out.push_back({spec.categories[i], y[i], start, sweep});
    start += sweep;
  }
  return out;
}

std::vector<ViolinBand> violin_bands(const ChartSpec& spec) {
  spec.validate();
  std::vector<ViolinBand> out;
  for (const auto& s : spec.series) out.push_back({s.label, stats::quartiles(s.y)});
  return out;
}

std::string render_svg(const ChartSpec& spec) {
  spec.validate();
  Canvas c(spec);
  switch (spec.kind) {
    case ChartKind::Line: render_line(c, spec); break;
    case ChartKind::Violin: render_violin(c, spec); break;
    case ChartKind::Pie: render_pie(c, spec); break;
    case ChartKind::Bar: render_bar(c, spec); break;
  }
  return c.finish();
}

void write_chart_csv(std::ostream& out, const ChartSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ChartKind::Line:
      out << "series,x,y\n";
      for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << text::csv_field(s.label) << ',' << text::fixed(s.x[i], 6) << ',' << text::fixed(s.y[i], 6) << '\n';
      break;
    case ChartKind::Violin:
      out << "series,value\n";
      for (const auto& s : spec.series)
        for (double v : s.y) out << text::csv_field(s.label) << ',' << text::fixed(v, 6) << '\n';
      break;
    case ChartKind::Pie: {
      out << "category,value,percent,sweep_deg\n";
      double total = 0;
      for (double v : spec.series.front().y) total += v;
      for (const auto& w : pie_wedges(spec))
        out << text::csv_field(w.label) << ',' << text::fixed(w.value, 6) << ','
            << text::fixed(100.0 * w.value / total, 6) << ',' << text::fixed(w.sweep_deg, 6) << '\n';
      break;
    }
    case ChartKind::Bar:
      out << "series,category,value\n";
      for (const auto& s : spec.series)
        for (std::size_t i = 0; i < spec.categories.size(); ++i)
          out << text::csv_field(s.label) << ',' << text::csv_field(spec.categories[i]) << ','
              << text::fixed(s.y[i], 6) << '\n';
      break;
  }
}

std::string render_chart(const ChartSpec& spec) {
  const std::string svg = render_svg(spec);
  if (spec.output.empty()) throw InputError("chart '" + spec.title + "' has no output path");
  if (spec.output.has_parent_path()) std::filesystem::create_directories(spec.output.parent_path());
  {
    std::ofstream f(spec.output, std::ios::binary);
    if (!f) throw InputError("cannot write " + spec.output.string());
    f << svg;
  }
  auto csv_path = spec.output;
  csv_path.replace_extension(".csv");
  std::ofstream f(csv_path, std::ios::binary);
  if (!f) throw InputError("cannot write " + csv_path.string());
  write_chart_csv(f, spec);
  return svg;
}

}  // namespace narrative::report
