#include "narrative/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "narrative/llm/parallel.hpp"
#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"
#include "narrative/text.hpp"

namespace narrative::bench {

using llm::json;

namespace {

int parse_position(const std::string& field, const char* column, std::size_t line) {
  const std::string t = text::trim(field);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(std::string(column) + ": not an integer: '" + t + "'", line);
  return v;
}

// Narrative ids in first-appearance order with their records.
struct Grouped {
  std::vector<std::string> order;
  std::map<std::string, std::vector<AnnotationRecord>> by_id;
};

Grouped group(std::span<const AnnotationRecord> records) {
  Grouped g;
  for (const auto& r : records) {
    auto [it, inserted] = g.by_id.try_emplace(r.narrative_id);
    if (inserted) g.order.push_back(r.narrative_id);
    it->second.push_back(r);
  }
  return g;
}

}  // namespace

std::vector<AnnotationRecord> read_annotations_csv(std::istream& in) {
  const auto table = text::read_csv(in);
  const std::size_t c_id = table.column("narrative_id");
  const std::size_t c_ann = table.column("annotator_id");
  const std::size_t c_arc = table.column("arc");
  std::array<std::size_t, 5> c_tp{};
  for (std::size_t k = 0; k < 5; ++k) c_tp[k] = table.column("tp" + std::to_string(k + 1));

  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    AnnotationRecord rec;
    rec.narrative_id = text::trim(row[c_id]);
    rec.annotator_id = text::trim(row[c_ann]);
    if (rec.narrative_id.empty()) throw ParseError("empty narrative_id", line);
    if (rec.annotator_id.empty()) throw ParseError("empty annotator_id", line);
    auto arc = discourse::arc_from_string(row[c_arc]);
    if (!arc) throw ParseError("unknown arc '" + row[c_arc] + "'", line);
    rec.arc = *arc;
    std::array<int, 5> pos{};
    for (std::size_t k = 0; k < 5; ++k) {
      const std::string col = "tp" + std::to_string(k + 1);
      pos[k] = parse_position(row[c_tp[k]], col.c_str(), line);
    }
    rec.tps = TurningPointSet(pos);
    if (!seen.emplace(rec.narrative_id, rec.annotator_id).second) {
      throw ConflictError("line " + std::to_string(line) + ": annotator " + rec.annotator_id +
                          " already labelled " + rec.narrative_id);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotations " + path);
  return read_annotations_csv(in);
}

void validate_annotations(std::span<const AnnotationRecord> records, const corpus::CorpusStore& corpus) {
  for (const auto& r : records) {
    const auto* n = corpus.find(r.narrative_id);
    if (!n) throw InputError("annotation references unknown narrative " + r.narrative_id);
    try {
      r.tps.validate(n->sentence_count());
    } catch (const DomainError& e) {
      throw DomainError(r.narrative_id + " (annotator " + r.annotator_id + "): " + e.what());
    }
  }
}

GoldStandard resolve_gold(std::span<const AnnotationRecord> annotations, GoldResolution resolution) {
  if (annotations.empty()) throw InputError("resolve_gold needs at least one annotation");
  GoldStandard g;
  g.narrative_id = annotations.front().narrative_id;
  for (const auto& a : annotations) {
    if (a.narrative_id != g.narrative_id) throw InputError("resolve_gold: mixed narrative ids");
  }

  if (resolution == GoldResolution::FirstAnnotator) {
    g.arc = annotations.front().arc;
    g.tps = annotations.front().tps;
    g.accepted_arcs = {*g.arc};
    for (auto tp : discourse::kAllTurningPoints) g.accepted_tps[tp_index(tp)] = {g.tps[tp]};
    return g;
  }

  std::map<ArcType, std::size_t> votes;
  for (const auto& a : annotations) ++votes[a.arc];
  for (const auto& [arc, count] : votes) {
    if (2 * count > annotations.size()) g.arc = arc;
  }
  std::array<int, 5> pos{};
  for (auto tp : discourse::kAllTurningPoints) {
    std::vector<int> v;
    for (const auto& a : annotations) v.push_back(a.tps[tp]);
    std::sort(v.begin(), v.end());
    pos[tp_index(tp)] = v[(v.size() - 1) / 2];
  }
  g.tps = TurningPointSet(pos);

  if (resolution == GoldResolution::AnyAnnotator) {
    for (const auto& a : annotations) {
      g.accepted_arcs.insert(a.arc);
      for (auto tp : discourse::kAllTurningPoints) g.accepted_tps[tp_index(tp)].insert(a.tps[tp]);
    }
  } else {
    if (g.arc) g.accepted_arcs = {*g.arc};
    for (auto tp : discourse::kAllTurningPoints) g.accepted_tps[tp_index(tp)] = {g.tps[tp]};
  }
  return g;
}

GoldMap resolve_all(std::span<const AnnotationRecord> records, GoldResolution resolution) {
  GoldMap out;
  const auto g = group(records);
  for (const auto& id : g.order) out.emplace(id, resolve_gold(g.by_id.at(id), resolution));
  return out;
}

// ---------------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------------

json to_json(const Prediction& p) {
  json j = {{"narrative_id", p.narrative_id}, {"abstained", p.abstained}};
  if (p.arc) j["arc"] = std::string(discourse::arc_key(*p.arc));
  if (p.tps) j["tps"] = json::parse(llm::format_tps(*p.tps));
  return j;
}

Prediction prediction_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("prediction must be a JSON object");
  Prediction p;
  if (!j.contains("narrative_id") || !j["narrative_id"].is_string()) throw ParseError("missing narrative_id");
  p.narrative_id = j["narrative_id"].get<std::string>();
  if (j.contains("abstained")) {
    if (!j["abstained"].is_boolean()) throw ParseError("abstained must be a boolean");
    p.abstained = j["abstained"].get<bool>();
  }
  if (j.contains("arc") && !j["arc"].is_null()) {
    if (!j["arc"].is_string()) throw ParseError("arc must be a string");
    p.arc = discourse::parse_arc_name(j["arc"].get<std::string>());
  }
  if (j.contains("tps") && !j["tps"].is_null()) {
    const auto& t = j["tps"];
    if (!t.is_object()) throw ParseError("tps must be an object");
    std::array<int, 5> pos{};
    for (std::size_t k = 0; k < 5; ++k) {
      const std::string key = "tp" + std::to_string(k + 1);
      if (!t.contains(key) || !t[key].is_number_integer()) throw ParseError("tps." + key + " must be an integer");
      pos[k] = t[key].get<int>();
    }
    p.tps = TurningPointSet(pos);
  }
  return p;
}

std::vector<Prediction> read_predictions_jsonl(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      out.push_back(prediction_from_json(j));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

void write_predictions_jsonl(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions) out << to_json(p).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

namespace {

struct ItemResult {
  Prediction prediction;
  std::vector<llm::ChatExchange> exchanges;
  std::optional<std::string> skipped;
};

template <class Build>
TaskRun run_items(const GoldMap& gold, std::size_t workers, Build&& build) {
  std::vector<const GoldStandard*> items;
  for (const auto& [id, g] : gold) items.push_back(&g);
  std::vector<ItemResult> results(items.size());
  llm::parallel_for(items.size(), workers, [&](std::size_t i) { results[i] = build(*items[i]); });

  TaskRun run;
  for (auto& r : results) {
    if (r.skipped) {
      run.skipped.push_back({r.prediction.narrative_id, *r.skipped});
      continue;
    }
    for (auto& ex : r.exchanges) run.exchanges.push_back({r.prediction.narrative_id, std::move(ex)});
    run.predictions.push_back(std::move(r.prediction));
  }
  return run;
}

template <class T>
void complete_item(ItemResult& out, llm::ChatClient& client, llm::Messages messages,
                   const std::function<T(const std::string&)>& parse, int repairs,
                   std::optional<T> Prediction::*field) {
  try {
    auto r = llm::complete_structured<T>(client, std::move(messages), parse, llm::TaskKind::Comprehension,
                                         repairs);
    out.exchanges = std::move(r.exchanges);
    if (r.value) {
      out.prediction.*field = std::move(r.value);
    } else {
      out.prediction.abstained = true;
      out.prediction.error = "unparseable answer: " + r.error;
    }
  } catch (const llm::ProviderError& e) {
    out.prediction.abstained = true;
    out.prediction.error = std::string("provider error: ") + e.what();
  }
}

void require_corpus(const corpus::CorpusStore& corpus, const GoldMap& gold) {
  for (const auto& [id, g] : gold) {
    if (!corpus.find(id)) throw InputError("gold references narrative " + id + " missing from the corpus");
  }
}

}  // namespace

TaskRun run_arc_task(const corpus::CorpusStore& corpus, const GoldMap& gold, llm::ChatClient& client,
                     ArcVariant variant, const TaskOptions& options) {
  require_corpus(corpus, gold);
  return run_items(gold, options.workers, [&](const GoldStandard& g) {
    ItemResult out;
    out.prediction.narrative_id = g.narrative_id;
    const auto sentences = corpus.at(g.narrative_id).texts();
    auto messages = variant == ArcVariant::Plain ? llm::arc_identify_prompt(sentences)
                                                 : llm::arc_identify_with_tps_prompt(sentences, g.tps);
    complete_item<ArcType>(out, client, std::move(messages),
                           [](const std::string& t) { return llm::parse_arc(t); }, options.repairs,
                           &Prediction::arc);
    return out;
  });
}

TaskRun run_tp_task(const corpus::CorpusStore& corpus, const GoldMap& gold, llm::ChatClient& client,
                    TpVariant variant, const TaskOptions& options) {
  require_corpus(corpus, gold);
  return run_items(gold, options.workers, [&](const GoldStandard& g) {
    ItemResult out;
    out.prediction.narrative_id = g.narrative_id;
    if (variant == TpVariant::WithArcPrior && !g.arc) {
      out.skipped = "gold arc is ambiguous; arc prior unavailable";
      return out;
    }
    const auto sentences = corpus.at(g.narrative_id).texts();
    const std::size_t n = sentences.size();
    auto messages = variant == TpVariant::Plain ? llm::tp_identify_prompt(sentences)
                                                : llm::tp_identify_with_arc_prompt(sentences, *g.arc);
    complete_item<TurningPointSet>(out, client, std::move(messages),
                                   [n](const std::string& t) { return llm::parse_tps(t, n); }, options.repairs,
                                   &Prediction::tps);
    return out;
  });
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

std::string_view mode_name(MatchMode mode) { return mode == MatchMode::Exact ? "exact" : "fuzzy"; }

MatchMode parse_mode(std::string_view s) {
  const auto t = text::to_lower(text::trim(s));
  if (t == "exact") return MatchMode::Exact;
  if (t == "fuzzy") return MatchMode::Fuzzy;
  throw InputError("unknown match mode '" + std::string(s) + "' (expected exact or fuzzy)");
}

ScoreTargets infer_targets(std::span<const Prediction> predictions) {
  ScoreTargets t{false, false};
  for (const auto& p : predictions) {
    t.arc = t.arc || p.arc.has_value();
    t.tp = t.tp || p.tps.has_value();
  }
  if (!t.arc && !t.tp) t = {true, true};
  return t;
}

std::vector<std::string> id_difference(std::span<const Prediction> predictions, const GoldMap& gold) {
  std::set<std::string> pred_ids;
  std::vector<std::string> diff;
  for (const auto& p : predictions) {
    if (!pred_ids.insert(p.narrative_id).second) diff.push_back("duplicate prediction: " + p.narrative_id);
  }
  for (const auto& [id, g] : gold) {
    if (!pred_ids.count(id)) diff.push_back("missing prediction: " + id);
  }
  for (const auto& id : pred_ids) {
    if (!gold.count(id)) diff.push_back("no gold for prediction: " + id);
  }
  return diff;
}

ScoreReport score(std::span<const Prediction> predictions, const GoldMap& gold, MatchMode mode,
                  std::optional<ScoreTargets> targets) {
  const auto diff = id_difference(predictions, gold);
  if (!diff.empty()) throw InputError("prediction and gold ids differ:\n  " + text::join(diff, "\n  "));

  ScoreReport r;
  r.mode = mode;
  r.targets = targets ? *targets : infer_targets(predictions);
  r.items = predictions.size();

  std::array<std::size_t, 5> tp_hits{};
  std::size_t arc_hits = 0;
  for (const auto& p : predictions) {
    const auto& g = gold.at(p.narrative_id);
    if (p.abstained) ++r.abstentions;
    if (!g.accepted_arcs.empty()) {
      ++r.arc_items;
      if (p.arc && !p.abstained) {
        const bool hit = std::any_of(g.accepted_arcs.begin(), g.accepted_arcs.end(), [&](ArcType a) {
          return mode == MatchMode::Exact ? *p.arc == a : discourse::fuzzy_arc_match(*p.arc, a);
        });
        if (hit) ++arc_hits;
      }
    }
    if (p.tps && !p.abstained) {
      for (auto tp : discourse::kAllTurningPoints) {
        const int pred = (*p.tps)[tp];
        const auto& accepted = g.accepted_tps[tp_index(tp)];
        const int window = mode == MatchMode::Exact ? 0 : discourse::kDefaultTpWindow;
        if (std::any_of(accepted.begin(), accepted.end(),
                        [&](int gpos) { return discourse::tp_window_match(pred, gpos, window); }))
          ++tp_hits[tp_index(tp)];
      }
    }
  }

  if (r.items > 0) {
    for (std::size_t k = 0; k < 5; ++k)
      r.tp_accuracy[k] = 100.0 * static_cast<double>(tp_hits[k]) / static_cast<double>(r.items);
  }
  r.tp_average = std::accumulate(r.tp_accuracy.begin(), r.tp_accuracy.end(), 0.0) / 5.0;
  if (r.arc_items > 0) r.arc_accuracy = 100.0 * static_cast<double>(arc_hits) / static_cast<double>(r.arc_items);
  return r;
}

void write_score_csv(std::ostream& out, const std::vector<std::pair<std::string, ScoreReport>>& rows) {
  out << "label,mode,TP1,TP2,TP3,TP4,TP5,Avg.,Arc,items,abstentions\n";
  for (const auto& [label, r] : rows) {
    out << text::csv_field(label) << ',' << mode_name(r.mode);
    for (double v : r.tp_accuracy) out << ',' << (r.targets.tp ? text::fixed(v, 1) : "");
    out << ',' << (r.targets.tp ? text::fixed(r.tp_average, 1) : "");
    out << ',' << (r.targets.arc && r.arc_items > 0 ? text::fixed(r.arc_accuracy, 1) : "");
    out << ',' << r.items << ',' << r.abstentions << '\n';
  }
}

std::string format_score_text(const std::string& label, const ScoreReport& r) {
  std::ostringstream os;
  os << label << " [" << mode_name(r.mode) << "] items=" << r.items << " abstentions=" << r.abstentions << '\n';
  if (r.targets.tp) {
    os << " ";
    for (std::size_t k = 0; k < 5; ++k) os << " TP" << k + 1 << ' ' << text::fixed(r.tp_accuracy[k], 1);
    os << "  Avg. " << text::fixed(r.tp_average, 1) << '\n';
  }
  if (r.targets.arc) {
    if (r.arc_items > 0)
      os << "  Arc " << text::fixed(r.arc_accuracy, 1) << " (" << r.arc_items << " scorable)\n";
    else
      os << "  Arc n/a (no unambiguous gold arcs)\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Agreement and distributions
// ---------------------------------------------------------------------------

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("spearman: length mismatch");
  if (a.size() < 2) throw InputError("spearman needs at least 2 observations");
  const auto ra = stats::average_ranks(a);
  const auto rb = stats::average_ranks(b);
  return stats::pearson(ra, rb);
}

ArcShares distribution_shares(std::span<const ArcType> labels) {
  if (labels.empty()) throw InputError("distribution_shares: no labels");
  ArcShares s;
  s.total = labels.size();
  for (auto a : labels) ++s.counts[static_cast<std::size_t>(a)];

  // Largest remainder in tenths of a percent, ties broken by arc order.
  const double n = static_cast<double>(s.total);
  std::array<long, 7> tenths{};
  std::array<std::pair<double, std::size_t>, 7> rem{};
  long assigned = 0;
  for (std::size_t k = 0; k < 7; ++k) {
    s.percent[k] = 100.0 * static_cast<double>(s.counts[k]) / n;
    const double exact = 1000.0 * static_cast<double>(s.counts[k]) / n;
    tenths[k] = static_cast<long>(std::floor(exact + 1e-9));
    rem[k] = {exact - static_cast<double>(tenths[k]), k};
    assigned += tenths[k];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (long left = 1000 - assigned, i = 0; left > 0; --left, ++i) ++tenths[rem[static_cast<std::size_t>(i)].second];
  for (std::size_t k = 0; k < 7; ++k) s.rounded[k] = static_cast<double>(tenths[k]) / 10.0;
  return s;
}

TpPositionSummary tp_position_summary(const std::map<std::string, TurningPointSet>& positions,
                                      const corpus::CorpusStore& corpus) {
  TpPositionSummary out;
  for (const auto& [id, tps] : positions) {
    const long n = static_cast<long>(corpus.at(id).sentence_count());
    for (auto tp : discourse::kAllTurningPoints)
      out.relative[tp_index(tp)].push_back(discourse::relative_position(tps[tp], n));
  }
  for (std::size_t k = 0; k < 5; ++k) {
    if (!out.relative[k].empty()) out.quartiles[k] = stats::quartiles(out.relative[k]);
  }
  return out;
}

AgreementReport inter_annotator_agreement(std::span<const AnnotationRecord> records) {
  const auto g = group(records);
  std::size_t slots = 0;
  AgreementReport report;
  for (const auto& id : g.order) {
    const auto n = g.by_id.at(id).size();
    slots = std::max(slots, n);
    if (n >= 2) ++report.narratives;
  }
  if (report.narratives == 0) throw InsufficientDataError("agreement needs narratives with at least 2 annotators");

  double kappa_sum = 0, rho_sum = 0;
  for (std::size_t j = 0; j < slots; ++j) {
    for (std::size_t k = j + 1; k < slots; ++k) {
      std::vector<ArcType> arcs_a, arcs_b;
      std::vector<double> pos_a, pos_b;
      for (const auto& id : g.order) {
        const auto& recs = g.by_id.at(id);
        if (recs.size() <= k) continue;
        arcs_a.push_back(recs[j].arc);
        arcs_b.push_back(recs[k].arc);
        for (auto tp : discourse::kAllTurningPoints) {
          pos_a.push_back(recs[j].tps[tp]);
          pos_b.push_back(recs[k].tps[tp]);
        }
      }
      if (arcs_a.empty()) continue;
      kappa_sum += cohen_kappa<ArcType>(arcs_a, arcs_b);
      rho_sum += spearman(pos_a, pos_b);
      ++report.rater_pairs;
    }
  }
  report.arc_kappa = kappa_sum / static_cast<double>(report.rater_pairs);
  report.tp_spearman = rho_sum / static_cast<double>(report.rater_pairs);
  return report;
}

ScoreReport human_baseline(std::span<const AnnotationRecord> records, MatchMode mode) {
  const auto g = group(records);
  std::vector<Prediction> preds;
  GoldMap gold;
  for (const auto& id : g.order) {
    const auto& recs = g.by_id.at(id);
    if (recs.size() < 2) continue;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      std::vector<AnnotationRecord> rest;
      for (std::size_t o = 0; o < recs.size(); ++o)
        if (o != i) rest.push_back(recs[o]);
      const std::string key = id + "/" + recs[i].annotator_id;
      for (auto& r : rest) r.narrative_id = key;
      auto resolved = resolve_gold(rest, GoldResolution::Majority);
      gold.emplace(key, std::move(resolved));
      preds.push_back({key, recs[i].arc, recs[i].tps, false, {}});
    }
  }
  if (preds.empty()) throw InsufficientDataError("human baseline needs narratives with at least 2 annotators");
  return score(preds, gold, mode, ScoreTargets{true, true});
}

}  // namespace narrative::bench
