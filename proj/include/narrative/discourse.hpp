#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace narrative::discourse {

// ---------------------------------------------------------------------------
// Story arcs (macro level)
// ---------------------------------------------------------------------------

enum class ArcType {
  RagsToRiches,
  RichesToRags,
  ManInHole,
  DoubleManInHole,
  Icarus,
  Cinderella,
  Oedipus,
};

inline constexpr std::array<ArcType, 7> kAllArcs = {
    ArcType::RagsToRiches, ArcType::RichesToRags, ArcType::ManInHole, ArcType::DoubleManInHole,
    ArcType::Icarus,       ArcType::Cinderella,   ArcType::Oedipus,
};

enum class FortuneLevel { Low, High };
enum class Direction { Rise, Fall };
enum class Emphasis { Normal, Significant };

struct ArcSegment {
  Direction direction;
  Emphasis emphasis = Emphasis::Normal;
  friend bool operator==(const ArcSegment&, const ArcSegment&) = default;
};

/// Rise/fall signature of an arc. Emphasis is descriptive only; matching
/// never looks at it.
struct ArcShape {
  FortuneLevel start_level;
  FortuneLevel end_level;
  std::vector<ArcSegment> segments;
};

/// Canonical key used in every file format, e.g. "ManInHole".
std::string_view arc_key(ArcType arc);
/// Human-readable name used in prompts and reports, e.g. "Man in Hole".
std::string_view arc_display_name(ArcType arc);
/// One-sentence definition of the arc's fortune trajectory.
std::string_view arc_description(ArcType arc);

/// Accepts the canonical key or the display name (case-insensitive,
/// optional article: "Man in a Hole" works).
std::optional<ArcType> arc_from_string(std::string_view s);
/// Like arc_from_string but throws ParseError.
ArcType parse_arc_name(std::string_view s);

const ArcShape& arc_shape(ArcType arc);

/// Walks the segments from the start level; used to check shape consistency.
FortuneLevel replay_shape(const ArcShape& shape);

std::string_view level_name(FortuneLevel level);
std::string_view direction_name(Direction d);

// ---------------------------------------------------------------------------
// Turning points (meso level)
// ---------------------------------------------------------------------------

enum class TurningPoint { Opportunity = 0, ChangeOfPlans, PointOfNoReturn, MajorSetback, Climax };

inline constexpr std::array<TurningPoint, 5> kAllTurningPoints = {
    TurningPoint::Opportunity, TurningPoint::ChangeOfPlans, TurningPoint::PointOfNoReturn,
    TurningPoint::MajorSetback, TurningPoint::Climax,
};

/// "TP1".."TP5".
std::string_view tp_label(TurningPoint tp);
/// "Opportunity", "Change of Plans", ...
std::string_view tp_name(TurningPoint tp);
std::string_view tp_description(TurningPoint tp);
constexpr std::size_t tp_index(TurningPoint tp) { return static_cast<std::size_t>(tp); }

/// Five 1-based sentence positions indexed by TurningPoint.
class TurningPointSet {
 public:
  TurningPointSet() = default;
  explicit TurningPointSet(std::array<int, 5> positions) : positions_(positions) {}

  int operator[](TurningPoint tp) const { return positions_[tp_index(tp)]; }
  int& operator[](TurningPoint tp) { return positions_[tp_index(tp)]; }
  const std::array<int, 5>& positions() const { return positions_; }

  /// Throws DomainError if any position lies outside [1, sentence_count].
  void validate(std::size_t sentence_count) const;

  /// Out-of-order positions are legal; this reports them as warnings.
  std::vector<std::string> order_warnings() const;

  friend bool operator==(const TurningPointSet&, const TurningPointSet&) = default;

 private:
  std::array<int, 5> positions_{};
};

// ---------------------------------------------------------------------------
// Position math and fuzzy matching
// ---------------------------------------------------------------------------

/// p / N; throws DomainError unless 1 <= p <= N.
double relative_position(long position, long sentence_count);

/// Arcs easily confused with `gold`. Symmetric; Icarus has none.
std::span<const ArcType> hard_pairs(ArcType gold);

bool fuzzy_arc_match(ArcType predicted, ArcType gold);

inline constexpr int kDefaultTpWindow = 3;

/// |predicted - gold| <= window, inclusive at both ends.
bool tp_window_match(int predicted, int gold, int window = kDefaultTpWindow);

}  // namespace narrative::discourse
