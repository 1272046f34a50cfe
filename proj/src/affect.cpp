#include "narrative/affect.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"
#include "narrative/text.hpp"

namespace narrative::affect {

void VadLexicon::insert(const std::string& term, VadScore score) {
  entries_[text::to_lower(text::trim(term))] = score;
}

const VadScore* VadLexicon::find(std::string_view term) const {
  auto it = entries_.find(text::to_lower(text::trim(term)));
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

std::optional<double> parse_number(std::string_view s) {
  const std::string t = text::trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

LexiconLoad load_lexicon(std::istream& in) {
  LexiconLoad out;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 4)
      throw ParseError("expected 4 tab-separated columns, got " + std::to_string(cols.size()), line_no);

    std::array<std::optional<double>, 3> scores = {parse_number(cols[1]), parse_number(cols[2]),
                                                   parse_number(cols[3])};
    const bool numeric = scores[0] && scores[1] && scores[2];
    if (first_row) {
      first_row = false;
      if (!numeric && !scores[0] && !scores[1] && !scores[2]) {
        out.had_header = true;
        continue;
      }
    }
    if (!numeric) throw ParseError("non-numeric score", line_no);
    for (const auto& s : scores)
      if (*s < 0.0 || *s > 1.0) throw ParseError("score " + text::fixed(*s, 3) + " outside [0,1]", line_no);

    const std::string term = text::to_lower(text::trim(cols[0]));
    if (term.empty()) throw ParseError("empty term", line_no);
    if (out.lexicon.find(term)) {
      ++out.duplicates;
      out.warnings.push_back("line " + std::to_string(line_no) + ": duplicate term '" + term +
                             "', keeping the last occurrence");
    }
    out.lexicon.insert(term, {*scores[0], *scores[1], *scores[2]});
    ++out.rows;
  }
  return out;
}

LexiconLoad load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon " + path);
  return load_lexicon(in);
}

std::string_view dimension_name(Dimension d) { return d == Dimension::Arousal ? "arousal" : "valence"; }

SentenceAffect sentence_affect(const std::array<std::string, 3>& adjectives, const VadLexicon& lexicon) {
  double arousal = 0, valence = 0;
  int found = 0;
  for (const auto& adj : adjectives) {
    if (const auto* s = lexicon.find(adj)) {
      arousal += s->arousal;
      valence += s->valence;
      ++found;
    }
  }
  SentenceAffect out;
  out.coverage = found;
  if (found > 0) {
    out.arousal = std::clamp(arousal / found, 0.0, 1.0);
    out.valence = std::clamp(valence / found, 0.0, 1.0);
  }
  return out;
}

EmotionObservation observe(std::size_t sentence_index, const std::array<std::string, 3>& adjectives,
                           const VadLexicon& lexicon) {
  const auto a = sentence_affect(adjectives, lexicon);
  return {sentence_index, adjectives, a.arousal, a.valence, a.coverage};
}

std::vector<Point> build_scatter(std::span<const EmotionObservation> observations,
                                 std::size_t sentence_count, Dimension dimension) {
  if (sentence_count == 0) throw DomainError("sentence count must be >= 1");
  std::vector<Point> out;
  std::size_t previous = 0;
  for (const auto& o : observations) {
    if (o.sentence_index < 1 || o.sentence_index > sentence_count) {
      throw DomainError("sentence index " + std::to_string(o.sentence_index) + " outside [1, " +
                        std::to_string(sentence_count) + "]");
    }
    if (o.sentence_index <= previous) throw InputError("observations must be sorted by sentence index");
    previous = o.sentence_index;
    if (auto v = o.value(dimension))
      out.push_back({static_cast<double>(o.sentence_index) / static_cast<double>(sentence_count), *v});
  }
  return out;
}

namespace {

// Linear interpolation over sorted points with edge hold outside the span.
double lerp_points(std::span<const Point> pts, double x) {
  if (x <= pts.front().x) return pts.front().y;
  if (x >= pts.back().x) return pts.back().y;
  auto hi = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const Point& p) { return v < p.x; });
  auto lo = hi - 1;
  if (x == lo->x) return lo->y;
  const double t = (x - lo->x) / (hi->x - lo->x);
  return lo->y + t * (hi->y - lo->y);
}

std::vector<double> even_grid(double from, double to, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = i + 1 == n ? to : from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace

AffectCurve interpolate(std::span<const Point> scatter, std::size_t grid_size, Dimension dimension) {
  if (scatter.size() < 2) throw InsufficientDataError("interpolation needs at least 2 points");
  if (grid_size < 2) throw InputError("grid size must be >= 2");
  for (std::size_t i = 1; i < scatter.size(); ++i) {
    if (!(scatter[i].x > scatter[i - 1].x))
      throw InputError("scatter x values must be distinct and increasing");
  }
  AffectCurve c;
  c.dimension = dimension;
  c.grid = even_grid(scatter.front().x, scatter.back().x, grid_size);
  c.values.reserve(grid_size);
  for (double x : c.grid) c.values.push_back(std::clamp(lerp_points(scatter, x), 0.0, 1.0));
  return c;
}

double sample(const AffectCurve& curve, double x) {
  if (curve.grid.empty()) throw InsufficientDataError("empty curve");
  std::vector<Point> pts(curve.grid.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {curve.grid[i], curve.values[i]};
  return lerp_points(pts, x);
}

AffectCurve resample_unit(const AffectCurve& curve, std::size_t grid_size) {
  if (grid_size < 2) throw InputError("grid size must be >= 2");
  if (curve.grid.size() != curve.values.size() || curve.grid.empty())
    throw InputError("malformed curve");
  std::vector<Point> pts(curve.grid.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {curve.grid[i], curve.values[i]};
  AffectCurve out;
  out.dimension = curve.dimension;
  out.grid = even_grid(0.0, 1.0, grid_size);
  out.values.reserve(grid_size);
  for (double x : out.grid) out.values.push_back(std::clamp(lerp_points(pts, x), 0.0, 1.0));
  return out;
}

AffectCurve aggregate(std::span<const AffectCurve> curves, std::size_t grid_size) {
  if (curves.empty()) throw InsufficientDataError("aggregate needs at least one curve");
  AffectCurve out;
  out.dimension = curves.front().dimension;
  out.grid = even_grid(0.0, 1.0, grid_size);
  out.values.assign(grid_size, 0.0);
  for (const auto& c : curves) {
    const auto r = resample_unit(c, grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) out.values[i] += r.values[i];
  }
  for (auto& v : out.values) v = std::clamp(v / static_cast<double>(curves.size()), 0.0, 1.0);
  return out;
}

void write_curve_csv(std::ostream& out, const AffectCurve& curve) {
  out << "x,value\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    out << text::fixed(curve.grid[i], 6) << ',' << text::fixed(curve.values[i], 6) << '\n';
}

NarrativeAffect annotate_narrative(const corpus::Narrative& narrative, llm::ChatClient& client,
                                   const VadLexicon& lexicon) {
  NarrativeAffect out;
  out.narrative_id = narrative.id;
  const auto sentences = narrative.texts();

  auto who = llm::complete_structured<std::string>(client, llm::protagonist_prompt(sentences),
                                                   [](const std::string& t) { return llm::parse_protagonist(t); });
  out.exchanges = who.exchanges;
  if (!who.value) throw ParseError("narrative " + narrative.id + ": protagonist not identified: " + who.error);
  out.protagonist = *who.value;

  for (std::size_t i = 1; i <= sentences.size(); ++i) {
    auto adj = llm::complete_structured<std::array<std::string, 3>>(
        client, llm::emotion_adjectives_prompt(sentences, out.protagonist, i),
        [](const std::string& t) { return llm::parse_adjectives(t); });
    out.exchanges.insert(out.exchanges.end(), adj.exchanges.begin(), adj.exchanges.end());
    if (!adj.value) {
      out.unparsed.push_back(i);
      continue;
    }
    out.observations.push_back(observe(i, *adj.value, lexicon));
  }
  return out;
}

std::optional<AffectCurve> narrative_curve(const NarrativeAffect& annotated, std::size_t sentence_count,
                                           Dimension dimension, std::size_t grid_size) {
  const auto scatter = build_scatter(annotated.observations, sentence_count, dimension);
  if (scatter.size() < 2) return std::nullopt;
  return interpolate(scatter, grid_size, dimension);
}

}  // namespace narrative::affect
