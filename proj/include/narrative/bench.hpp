#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "narrative/corpus.hpp"
#include "narrative/discourse.hpp"
#include "narrative/llm/client.hpp"
#include "narrative/stats.hpp"

namespace narrative::bench {

using discourse::ArcType;
using discourse::TurningPointSet;

// ---------------------------------------------------------------------------
// Annotations and gold labels
// ---------------------------------------------------------------------------

struct AnnotationRecord {
  std::string narrative_id;
  std::string annotator_id;
  ArcType arc = ArcType::ManInHole;
  TurningPointSet tps;
};

/// CSV header: narrative_id,annotator_id,arc,tp1,tp2,tp3,tp4,tp5.
std::vector<AnnotationRecord> read_annotations_csv(std::istream& in);
std::vector<AnnotationRecord> load_annotations(const std::string& path);

/// Every record must reference a corpus narrative and stay within its [1, N].
void validate_annotations(std::span<const AnnotationRecord> records, const corpus::CorpusStore& corpus);

enum class GoldResolution {
  Majority,        // strict-majority arc, lower-median TP position
  FirstAnnotator,  // labels of the first annotator listed
  AnyAnnotator,    // majority/median as reference, but any annotator's label earns credit
};

struct GoldStandard {
  std::string narrative_id;
  std::optional<ArcType> arc;  // empty when annotators have no strict majority
  TurningPointSet tps;
  /// Labels that earn credit when scoring; singletons except under AnyAnnotator.
  std::set<ArcType> accepted_arcs;
  std::array<std::set<int>, 5> accepted_tps;

  bool ambiguous() const { return !arc; }
};

using GoldMap = std::map<std::string, GoldStandard>;

/// Resolves one narrative's annotations (all records must share an id).
GoldStandard resolve_gold(std::span<const AnnotationRecord> annotations,
                          GoldResolution resolution = GoldResolution::Majority);

/// Groups records by narrative (annotator order as listed) and resolves each.
GoldMap resolve_all(std::span<const AnnotationRecord> records,
                    GoldResolution resolution = GoldResolution::Majority);

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

struct Prediction {
  std::string narrative_id;
  std::optional<ArcType> arc;
  std::optional<TurningPointSet> tps;
  bool abstained = false;
  /// Why the item abstained (provider or parse failure); not serialised.
  std::string error;
};

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);
std::vector<Prediction> read_predictions_jsonl(std::istream& in);
void write_predictions_jsonl(std::ostream& out, std::span<const Prediction> predictions);

// ---------------------------------------------------------------------------
// Benchmark tasks
// ---------------------------------------------------------------------------

enum class ArcVariant { Plain, WithTpDescriptions };
enum class TpVariant { Plain, WithArcPrior };

struct TaskOptions {
  std::size_t workers = 4;
  int repairs = 1;
};

struct SkippedItem {
  std::string narrative_id;
  std::string reason;
};

struct ItemExchange {
  std::string narrative_id;
  llm::ChatExchange exchange;
};

struct TaskRun {
  std::vector<Prediction> predictions;  // sorted by narrative id
  std::vector<SkippedItem> skipped;
  std::vector<ItemExchange> exchanges;  // grouped by narrative id, request order
};

/// One arc prediction per gold narrative. Provider failures and unparseable
/// answers become abstentions; the run continues.
TaskRun run_arc_task(const corpus::CorpusStore& corpus, const GoldMap& gold, llm::ChatClient& client,
                     ArcVariant variant, const TaskOptions& options = {});

/// One TP prediction per gold narrative. Under WithArcPrior, narratives with
/// an ambiguous gold arc are skipped with a reason.
TaskRun run_tp_task(const corpus::CorpusStore& corpus, const GoldMap& gold, llm::ChatClient& client,
                    TpVariant variant, const TaskOptions& options = {});

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

enum class MatchMode { Exact, Fuzzy };
std::string_view mode_name(MatchMode mode);
MatchMode parse_mode(std::string_view s);

struct ScoreTargets {
  bool arc = true;
  bool tp = true;
};

/// Targets present in the predictions (any arc / any TP set); both when all abstained.
ScoreTargets infer_targets(std::span<const Prediction> predictions);

struct ScoreReport {
  MatchMode mode = MatchMode::Exact;
  ScoreTargets targets;
  std::size_t items = 0;
  std::size_t abstentions = 0;
  std::array<double, 5> tp_accuracy{};  // percent
  double tp_average = 0;                // unweighted mean of the five
  double arc_accuracy = 0;              // percent over arc_items
  std::size_t arc_items = 0;            // items whose gold arc is unambiguous
};

/// Id sets of predictions and gold must match exactly (InputError listing the
/// difference otherwise). Abstentions count as misses.
ScoreReport score(std::span<const Prediction> predictions, const GoldMap& gold, MatchMode mode,
                  std::optional<ScoreTargets> targets = std::nullopt);

/// Ids in one map but not the other, formatted for diagnostics; empty when equal.
std::vector<std::string> id_difference(std::span<const Prediction> predictions, const GoldMap& gold);

/// Columns: label,mode,TP1,TP2,TP3,TP4,TP5,Avg.,Arc,items,abstentions (one decimal).
void write_score_csv(std::ostream& out, const std::vector<std::pair<std::string, ScoreReport>>& rows);
std::string format_score_text(const std::string& label, const ScoreReport& report);

// ---------------------------------------------------------------------------
// Agreement statistics
// ---------------------------------------------------------------------------

/// (p_o - p_e) / (1 - p_e) with chance agreement from the marginals. Defined
/// as 1.0 when p_e == 1.
template <class T>
double cohen_kappa(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw InputError("cohen_kappa: length mismatch");
  if (a.empty()) throw InputError("cohen_kappa: empty input");
  std::map<T, double> ma, mb;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1;
    mb[b[i]] += 1;
    if (a[i] == b[i]) agree += 1;
  }
  const double n = static_cast<double>(a.size());
  const double po = agree / n;
  double pe = 0;
  for (const auto& [label, count] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

/// Pearson correlation of average ranks. UndefinedError on zero rank variance.
double spearman(std::span<const double> a, std::span<const double> b);

struct ArcShares {
  std::size_t total = 0;
  std::array<std::size_t, 7> counts{};
  std::array<double, 7> percent{};  // exact
  std::array<double, 7> rounded{};  // one decimal, largest-remainder, sums to 100.0
};

ArcShares distribution_shares(std::span<const ArcType> labels);

struct TpPositionSummary {
  std::array<std::vector<double>, 5> relative;  // per TP, in narrative-id order
  std::array<std::optional<stats::Quartiles>, 5> quartiles;
};

/// Relative positions p/N per TP across narratives, with nearest-rank quartiles.
TpPositionSummary tp_position_summary(const std::map<std::string, TurningPointSet>& positions,
                                      const corpus::CorpusStore& corpus);

struct AgreementReport {
  double arc_kappa = 0;
  double tp_spearman = 0;
  std::size_t narratives = 0;    // narratives with >= 2 annotators
  std::size_t rater_pairs = 0;   // annotator slot pairs averaged
};

/// Annotators are aligned by slot (first, second, ... listed for a
/// narrative). Kappa over arcs and Spearman over pooled TP positions are
/// computed per slot pair and averaged.
AgreementReport inter_annotator_agreement(std::span<const AnnotationRecord> records);

/// Leave-one-annotator-out human baseline: each annotator is scored against
/// the majority/median gold of the remaining annotators of that narrative.
ScoreReport human_baseline(std::span<const AnnotationRecord> records, MatchMode mode);

}  // namespace narrative::bench
