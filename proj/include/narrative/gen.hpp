#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "narrative/corpus.hpp"
#include "narrative/discourse.hpp"
#include "narrative/llm/client.hpp"

namespace narrative::gen {

using discourse::ArcType;

enum class Strategy { OutlineOnly, SelfTp, HumanTp, ArcEnhanced };

/// "outline_only", "self_tp", "human_tp", "arc_enhanced".
std::string_view strategy_key(Strategy s);
Strategy parse_strategy(std::string_view s);

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct GenerationSpec {
  std::string id;
  Strategy strategy = Strategy::OutlineOnly;
  corpus::Premise premise;
  std::optional<ArcType> requested_arc;     // required iff ArcEnhanced
  std::optional<std::string> human_setback;  // required iff HumanTp
  std::optional<std::string> human_climax;   // required iff HumanTp

  /// Throws InputError on a missing or superfluous strategy-specific field.
  void validate() const;
};

llm::json to_json(const GenerationSpec& spec);
/// {"id","strategy","title","genre","setting", "requested_arc"?, "human_setback"?, "human_climax"?}
GenerationSpec spec_from_json(const llm::json& j);
/// One spec per line; validated. ParseError/InputError carry the line number.
std::vector<GenerationSpec> read_specs_jsonl(std::istream& in);

/// Prompt parameters for outline and story length.
struct LengthTargets {
  std::string outline_beats = "10-15";
  std::string story_sentences = "25-35";
};

/// Positions of the marked TP3, TP4 and TP5 sentences in the final story.
using MarkedTps = std::array<int, 3>;

struct GeneratedStory {
  GenerationSpec spec;
  std::vector<std::string> outline;  // after human_tp replacement
  corpus::Narrative story;
  std::optional<MarkedTps> marked_tps;  // present for SelfTp and HumanTp
  std::vector<llm::ChatExchange> exchanges;
};

llm::json to_json(const GeneratedStory& story);

/// Failure in one generation phase ("outline" or "expansion").
class GenerationError : public Error {
 public:
  GenerationError(std::string spec_id, std::string phase, const std::string& what)
      : Error(spec_id + " [" + phase + "]: " + what), spec_id_(std::move(spec_id)), phase_(std::move(phase)) {}
  const std::string& spec_id() const { return spec_id_; }
  const std::string& phase() const { return phase_; }

 private:
  std::string spec_id_;
  std::string phase_;
};

/// Phase-one prompt for the spec's strategy.
llm::Messages outline_prompt(const GenerationSpec& spec, const LengthTargets& lengths = {});
/// Phase-two prompt carrying the (possibly edited) outline.
llm::Messages expansion_prompt(const GenerationSpec& spec, std::span<const std::string> outline,
                               const LengthTargets& lengths = {});

/// Parses {"outline": [...]}. For SelfTp/HumanTp exactly one beat must start
/// with each of the tags [TP3], [TP4], [TP5].
std::vector<std::string> parse_outline(std::string_view text, Strategy strategy);

/// Replaces the [TP4] and [TP5] beats with the supplied texts, keeping the tags.
std::vector<std::string> replace_human_tps(std::vector<std::string> outline, const std::string& setback,
                                           const std::string& climax);

struct Expansion {
  std::vector<std::string> sentences;
  std::optional<MarkedTps> marked_tps;
};

/// Parses {"story": [...], "turning_points": {"tp3","tp4","tp5"}?}. Marked
/// positions are required when `expect_tps` and must lie in [1, N].
Expansion parse_expansion(std::string_view text, bool expect_tps);

/// Outline, then expansion. Parse failures after repair and provider errors
/// raise GenerationError naming the phase.
GeneratedStory generate(const GenerationSpec& spec, llm::ChatClient& client, const LengthTargets& lengths = {},
                        int repairs = 1);

struct GenerationOutcome {
  std::string spec_id;
  std::optional<GeneratedStory> story;
  std::string error;  // set when story is empty
};

/// Runs every spec on up to `workers` threads; results in spec order.
std::vector<GenerationOutcome> generate_all(std::span<const GenerationSpec> specs, llm::ChatClient& client,
                                            std::size_t workers, const LengthTargets& lengths = {},
                                            int repairs = 1);

// ---------------------------------------------------------------------------
// Requested-arc success
// ---------------------------------------------------------------------------

/// Judged arc of a story, or nullopt when the judge could not decide.
using ArcJudge = std::function<std::optional<ArcType>(const GeneratedStory&)>;

/// Arc identification prompt run through `client`; unparseable answers and
/// provider errors yield nullopt.
ArcJudge model_arc_judge(llm::ChatClient& client);

struct ArcSuccessTable {
  std::array<std::size_t, 7> requested{};
  std::array<std::size_t, 7> satisfied{};
  std::array<std::optional<double>, 7> accuracy;  // percent; empty for arcs never requested
  double average = 0;  // unweighted mean over requested arcs
  std::size_t stories = 0;
};

/// Exact match between judged and requested arc; an undecided judge counts
/// as a failure. Every story needs a requested arc (InputError otherwise).
ArcSuccessTable requested_arc_success(std::span<const GeneratedStory> stories, const ArcJudge& judge);

/// Same, on precomputed (requested, judged) pairs.
ArcSuccessTable requested_arc_success(std::span<const std::pair<ArcType, std::optional<ArcType>>> judged);

/// Columns: arc,requested,satisfied,accuracy; final row "Average".
void write_arc_success_csv(std::ostream& out, const ArcSuccessTable& table);

// ---------------------------------------------------------------------------
// Human judgments
// ---------------------------------------------------------------------------

enum class Criterion { Suspense, EmotionProvoking, OverallPreference };
std::string_view criterion_key(Criterion c);
Criterion parse_criterion(std::string_view s);

inline constexpr std::array<Strategy, 3> kRankedStrategies = {Strategy::OutlineOnly, Strategy::SelfTp,
                                                              Strategy::HumanTp};

struct RankJudgment {
  std::string item_id;
  std::string judge_id;
  Criterion criterion = Criterion::Suspense;
  std::array<Strategy, 3> ranking{};  // best, medium, worst

  /// Throws InputError unless ranking is a permutation of kRankedStrategies.
  void validate() const;
};

/// Header item_id,judge_id,criterion,best,medium,worst. One judgment per
/// (item, judge, criterion); repeats raise ConflictError.
std::vector<RankJudgment> read_rankings_csv(std::istream& in);

struct RankShares {
  std::size_t judgments = 0;
  std::array<std::size_t, 3> counts{};  // best, medium, worst
  std::array<double, 3> percent{};
};

/// criterion -> strategy -> shares, for the criteria present.
using RankingTable = std::map<Criterion, std::map<Strategy, RankShares>>;

/// Throws InputError on empty input or a non-permutation ranking.
RankingTable tabulate_rankings(std::span<const RankJudgment> judgments);

/// Columns: criterion,strategy,best,medium,worst,judgments (one decimal).
void write_ranking_table_csv(std::ostream& out, const RankingTable& table);

enum class Aspect { Theme, Setting, Conflict, Character, Overall };
inline constexpr std::array<Aspect, 5> kAllAspects = {Aspect::Theme, Aspect::Setting, Aspect::Conflict,
                                                      Aspect::Character, Aspect::Overall};
std::string_view aspect_key(Aspect a);
Aspect parse_aspect(std::string_view s);

enum class Verdict { OutlineOnly, Tie, ArcEnhanced };
std::string_view verdict_key(Verdict v);
Verdict parse_verdict(std::string_view s);

struct PairJudgment {
  std::string item_id;
  std::string judge_id;
  Aspect aspect = Aspect::Overall;
  Verdict verdict = Verdict::Tie;
};

/// Header item_id,judge_id,aspect,verdict. One verdict per (item, judge,
/// aspect); repeats raise ConflictError.
std::vector<PairJudgment> read_pairs_csv(std::istream& in);

struct PairShares {
  std::size_t judgments = 0;
  std::array<std::size_t, 3> counts{};  // outline_only, tie, arc_enhanced
  std::array<double, 3> percent{};
};

struct PairTable {
  std::map<Aspect, PairShares> aspects;
  std::vector<std::string> warnings;  // one per omitted aspect
};

/// Aspects without judgments are omitted with a warning.
PairTable tabulate_pairs(std::span<const PairJudgment> judgments);

/// Columns: aspect,outline_only,tie,arc_enhanced,judgments (one decimal).
void write_pair_table_csv(std::ostream& out, const PairTable& table);

// ---------------------------------------------------------------------------
// Blind evaluation bundles
// ---------------------------------------------------------------------------

/// Portable Fisher-Yates permutation of [0, n) driven by mt19937_64.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

struct BundleSummary {
  std::filesystem::path manifest;
  std::filesystem::path key_file;
  std::size_t stories = 0;
};

/// Writes stories/story_NNN.txt in shuffled order, key.json mapping each
/// anonymous file to its spec and strategy, and manifest.json listing the
/// files, the seed and the key file's SHA-256. Strategy never appears in
/// the story files or the manifest.
BundleSummary export_bundle(std::span<const GeneratedStory> stories, const std::filesystem::path& dir,
                            std::uint64_t seed);

}  // namespace narrative::gen
