#include "narrative/discourse.hpp"

#include <cctype>
#include <cstdlib>

#include "narrative/error.hpp"
#include "narrative/text.hpp"

namespace narrative::discourse {

namespace {

struct ArcInfo {
  ArcType arc;
  std::string_view key;
  std::string_view display;
  std::string_view description;
};

constexpr std::array<ArcInfo, 7> kArcInfo = {{
    {ArcType::RagsToRiches, "RagsToRiches", "Rags to Riches",
     "Starts low and gradually rises, ending in a high state."},
    {ArcType::RichesToRags, "RichesToRags", "Riches to Rags",
     "Starts high and gradually falls, ending in a low state."},
    {ArcType::ManInHole, "ManInHole", "Man in Hole",
     "Starts high, has a dilemma or crisis and finally finds a way out."},
    {ArcType::DoubleManInHole, "DoubleManInHole", "Double Man in Hole",
     "Two cycles of fall and rise."},
    {ArcType::Icarus, "Icarus", "Icarus", "A rise followed by a sharp fall."},
    {ArcType::Cinderella, "Cinderella", "Cinderella",
     "A rise, followed by a fall, ending with a significant rise."},
    {ArcType::Oedipus, "Oedipus", "Oedipus",
     "A fall, followed by a rise, ending with a significant fall."},
}};

const ArcInfo& info(ArcType arc) { return kArcInfo[static_cast<std::size_t>(arc)]; }

constexpr ArcSegment rise{Direction::Rise};
constexpr ArcSegment fall{Direction::Fall};
constexpr ArcSegment sharp_rise{Direction::Rise, Emphasis::Significant};
constexpr ArcSegment sharp_fall{Direction::Fall, Emphasis::Significant};

const std::array<ArcShape, 7>& shapes() {
  using L = FortuneLevel;
  static const std::array<ArcShape, 7> table = {{
      {L::Low, L::High, {rise}},
      {L::High, L::Low, {fall}},
      {L::High, L::High, {fall, rise}},
      {L::High, L::High, {fall, rise, fall, rise}},
      {L::Low, L::Low, {rise, sharp_fall}},
      {L::Low, L::High, {rise, fall, sharp_rise}},
      {L::High, L::Low, {fall, rise, sharp_fall}},
  }};
  return table;
}

struct TpInfo {
  std::string_view label;
  std::string_view name;
  std::string_view description;
};

constexpr std::array<TpInfo, 5> kTpInfo = {{
    {"TP1", "Opportunity", "The introductory event that sets the stage for the narrative."},
    {"TP2", "Change of Plans",
     "A pivotal moment where the main goal of the narrative is defined or altered."},
    {"TP3", "Point of No Return",
     "The commitment point beyond which the protagonists are invested in goals."},
    {"TP4", "Major Setback",
     "A critical juncture where the protagonists face significant challenges or failures."},
    {"TP5", "Climax",
     "The peak of the narrative arc, encompassing the resolution of the central conflict."},
}};

// Rows of the hard-pair table, keyed by gold arc.
constexpr std::array<ArcType, 2> kPairsManInHole = {ArcType::DoubleManInHole, ArcType::Cinderella};
constexpr std::array<ArcType, 2> kPairsDoubleManInHole = {ArcType::ManInHole, ArcType::Cinderella};
constexpr std::array<ArcType, 3> kPairsCinderella = {ArcType::RagsToRiches, ArcType::ManInHole,
                                                     ArcType::DoubleManInHole};
constexpr std::array<ArcType, 1> kPairsRagsToRiches = {ArcType::Cinderella};
constexpr std::array<ArcType, 1> kPairsRichesToRags = {ArcType::Oedipus};
constexpr std::array<ArcType, 1> kPairsOedipus = {ArcType::RichesToRags};

// Lowercase, drop articles, keep letters only: "Man in a Hole" -> "maninhole".
std::string squash(std::string_view s) {
  std::string out;
  for (const auto& word : text::split(text::collapse_whitespace(text::to_lower(s)), ' ')) {
    if (word == "a" || word == "the") continue;
    for (char c : word)
      if (std::isalpha(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

}  // namespace

std::string_view arc_key(ArcType arc) { return info(arc).key; }
std::string_view arc_display_name(ArcType arc) { return info(arc).display; }
std::string_view arc_description(ArcType arc) { return info(arc).description; }

std::optional<ArcType> arc_from_string(std::string_view s) {
  const std::string needle = squash(s);
  if (needle.empty()) return std::nullopt;
  for (const auto& a : kArcInfo) {
    if (needle == squash(a.key) || needle == squash(a.display)) return a.arc;
  }
  return std::nullopt;
}

ArcType parse_arc_name(std::string_view s) {
  if (auto arc = arc_from_string(s)) return *arc;
  throw ParseError("unknown story arc '" + std::string(s) + "'");
}

const ArcShape& arc_shape(ArcType arc) { return shapes()[static_cast<std::size_t>(arc)]; }

FortuneLevel replay_shape(const ArcShape& shape) {
  FortuneLevel level = shape.start_level;
  for (const auto& seg : shape.segments)
    level = seg.direction == Direction::Rise ? FortuneLevel::High : FortuneLevel::Low;
  return level;
}

std::string_view level_name(FortuneLevel level) {
  return level == FortuneLevel::High ? "high" : "low";
}

std::string_view direction_name(Direction d) { return d == Direction::Rise ? "rise" : "fall"; }

std::string_view tp_label(TurningPoint tp) { return kTpInfo[tp_index(tp)].label; }
std::string_view tp_name(TurningPoint tp) { return kTpInfo[tp_index(tp)].name; }
std::string_view tp_description(TurningPoint tp) { return kTpInfo[tp_index(tp)].description; }

void TurningPointSet::validate(std::size_t sentence_count) const {
  for (auto tp : kAllTurningPoints) {
    const int p = (*this)[tp];
    if (p < 1 || static_cast<std::size_t>(p) > sentence_count) {
      throw DomainError(std::string(tp_label(tp)) + " position " + std::to_string(p) +
                        " outside [1, " + std::to_string(sentence_count) + "]");
    }
  }
}

std::vector<std::string> TurningPointSet::order_warnings() const {
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < positions_.size(); ++i) {
    if (positions_[i] < positions_[i - 1]) {
      warnings.push_back(std::string(tp_label(kAllTurningPoints[i])) + " at " +
                         std::to_string(positions_[i]) + " precedes " +
                         std::string(tp_label(kAllTurningPoints[i - 1])) + " at " +
                         std::to_string(positions_[i - 1]));
    }
  }
  return warnings;
}

double relative_position(long position, long sentence_count) {
  if (sentence_count < 1 || position < 1 || position > sentence_count) {
    throw DomainError("position " + std::to_string(position) + " outside [1, " +
                      std::to_string(sentence_count) + "]");
  }
  return static_cast<double>(position) / static_cast<double>(sentence_count);
}

std::span<const ArcType> hard_pairs(ArcType gold) {
  switch (gold) {
    case ArcType::ManInHole: return kPairsManInHole;
    case ArcType::DoubleManInHole: return kPairsDoubleManInHole;
    case ArcType::Cinderella: return kPairsCinderella;
    case ArcType::RagsToRiches: return kPairsRagsToRiches;
    case ArcType::RichesToRags: return kPairsRichesToRags;
    case ArcType::Oedipus: return kPairsOedipus;
    case ArcType::Icarus: return {};
  }
  return {};
}

bool fuzzy_arc_match(ArcType predicted, ArcType gold) {
  if (predicted == gold) return true;
  for (ArcType a : hard_pairs(gold))
    if (a == predicted) return true;
  return false;
}

bool tp_window_match(int predicted, int gold, int window) {
  return std::abs(predicted - gold) <= window;
}

}  // namespace narrative::discourse
