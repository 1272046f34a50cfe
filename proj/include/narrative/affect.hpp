#pragma once

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "narrative/corpus.hpp"
#include "narrative/llm/client.hpp"

namespace narrative::affect {

// ---------------------------------------------------------------------------
// Lexicon
// ---------------------------------------------------------------------------

struct VadScore {
  double valence = 0;
  double arousal = 0;
  double dominance = 0;  // loaded, never used for scoring
};

class VadLexicon {
 public:
  /// Term is lowercased and trimmed; last insert wins.
  void insert(const std::string& term, VadScore score);
  const VadScore* find(std::string_view term) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, VadScore> entries_;
};

struct LexiconLoad {
  VadLexicon lexicon;
  std::size_t rows = 0;        // data rows read (header excluded)
  std::size_t duplicates = 0;
  bool had_header = false;
  std::vector<std::string> warnings;
};

/// term<TAB>valence<TAB>arousal<TAB>dominance. A first row whose score
/// columns are not numeric is taken as a header. Scores outside [0,1] or
/// non-numeric raise ParseError with the row's line number.
LexiconLoad load_lexicon(std::istream& in);
LexiconLoad load_lexicon_file(const std::string& path);

// ---------------------------------------------------------------------------
// Sentence scores
// ---------------------------------------------------------------------------

enum class Dimension { Arousal, Valence };
std::string_view dimension_name(Dimension d);

struct SentenceAffect {
  std::optional<double> arousal;
  std::optional<double> valence;
  int coverage = 0;  // adjectives found in the lexicon, 0..3
};

/// Mean over the adjectives present in the lexicon (exact lowercase lookup,
/// no lemmatisation). Coverage 0 leaves both scores empty.
SentenceAffect sentence_affect(const std::array<std::string, 3>& adjectives, const VadLexicon& lexicon);

struct EmotionObservation {
  std::size_t sentence_index = 0;  // 1-based
  std::array<std::string, 3> adjectives;
  std::optional<double> arousal;
  std::optional<double> valence;
  int coverage = 0;

  std::optional<double> value(Dimension d) const { return d == Dimension::Arousal ? arousal : valence; }
};

EmotionObservation observe(std::size_t sentence_index, const std::array<std::string, 3>& adjectives,
                           const VadLexicon& lexicon);

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr std::size_t kDefaultGridSize = 101;

struct AffectCurve {
  std::vector<double> grid;    // strictly increasing, within [0,1]
  std::vector<double> values;  // same length as grid, within [0,1]
  Dimension dimension = Dimension::Arousal;
};

/// One point (i/N, score) per observation that has a score. Observations must
/// be sorted by sentence index; an index outside [1, N] raises DomainError.
std::vector<Point> build_scatter(std::span<const EmotionObservation> observations,
                                 std::size_t sentence_count, Dimension dimension);

/// Piecewise-linear interpolation sampled at `grid_size` evenly spaced points
/// from the first to the last scatter x, clamped to [0,1]. Needs at least two
/// points with distinct, increasing x (InsufficientDataError otherwise).
AffectCurve interpolate(std::span<const Point> scatter, std::size_t grid_size, Dimension dimension);

/// Value of the curve at x; constant beyond either end of its span.
double sample(const AffectCurve& curve, double x);

/// Resamples onto `grid_size` evenly spaced points over [0,1] with edge hold.
AffectCurve resample_unit(const AffectCurve& curve, std::size_t grid_size);

/// Pointwise mean after resampling every curve onto the unit grid.
AffectCurve aggregate(std::span<const AffectCurve> curves, std::size_t grid_size = kDefaultGridSize);

/// CSV with header x,value.
void write_curve_csv(std::ostream& out, const AffectCurve& curve);

// ---------------------------------------------------------------------------
// Model-driven annotation
// ---------------------------------------------------------------------------

struct NarrativeAffect {
  std::string narrative_id;
  std::string protagonist;
  std::vector<EmotionObservation> observations;
  /// Sentences whose adjectives could not be parsed after repair.
  std::vector<std::size_t> unparsed;
  std::vector<llm::ChatExchange> exchanges;
};

/// Identifies the protagonist, then asks for three emotion adjectives per
/// sentence and scores them against the lexicon. Provider errors propagate.
NarrativeAffect annotate_narrative(const corpus::Narrative& narrative, llm::ChatClient& client,
                                   const VadLexicon& lexicon);

/// Interpolated curve for one annotated narrative, or nullopt when fewer than
/// two sentences carry a score.
std::optional<AffectCurve> narrative_curve(const NarrativeAffect& annotated, std::size_t sentence_count,
                                           Dimension dimension, std::size_t grid_size = kDefaultGridSize);

}  // namespace narrative::affect
