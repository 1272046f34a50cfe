#include "narrative/report/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "narrative/affect.hpp"
#include "narrative/bench.hpp"
#include "narrative/corpus.hpp"
#include "narrative/gen.hpp"
#include "narrative/llm/parallel.hpp"
#include "narrative/report/run.hpp"
#include "narrative/text.hpp"

namespace narrative::report {

namespace fs = std::filesystem;
using llm::json;

namespace {

struct Common {
  std::string provider = "mock";
  std::string config;
  std::string transcript;
  std::string record;
  std::string out;
  std::string cache_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 4;
};

void add_output(CLI::App* sub, Common& c) { sub->add_option("--out", c.out, "Run directory")->required(); }

void add_provider(CLI::App* sub, Common& c) {
  sub->add_option("--provider", c.provider, "Provider name in the config file (default: mock)");
  sub->add_option("--config", c.config, "Provider config file (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--transcript", c.transcript, "Replay transcript for the mock provider")->check(CLI::ExistingFile);
  sub->add_option("--record", c.record, "Write every exchange as a replay transcript to this file");
  sub->add_option("--cache-dir", c.cache_dir, "Persistent response cache directory");
  sub->add_option("--workers", c.workers, "Concurrent requests")->check(CLI::Range(1, 64));
}

void add_seed(CLI::App* sub, Common& c) { sub->add_option("--seed", c.seed, "Seed for every shuffle (default 0)"); }

// Collects outputs so the manifest can list them.
class RunDir {
 public:
  explicit RunDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& path() const { return dir_; }

  void write(const std::string& rel, const std::string& content) {
    write_text(dir_ / rel, content);
    outputs_.push_back(rel);
  }

  void add_outputs(const std::vector<std::string>& rels) { outputs_.insert(outputs_.end(), rels.begin(), rels.end()); }

  void finish(RunManifest m) {
    m.outputs = outputs_;
    m.outputs.push_back("config.snapshot");
    write_manifest(dir_, std::move(m));
  }

 private:
  fs::path dir_;
  std::vector<std::string> outputs_;
};

struct Session {
  llm::ProviderConfig config;
  std::shared_ptr<llm::Provider> provider;
  std::shared_ptr<llm::MockProvider> mock;
  std::shared_ptr<llm::ChatClient> client;
};

Session open_session(const Common& c) {
  Session s;
  if (!c.config.empty()) {
    s.config = llm::load_provider_config(c.config, c.provider);
  } else if (c.provider != "mock") {
    throw InputError("provider '" + c.provider + "' needs --config");
  }
  if (!c.transcript.empty()) s.config.transcript = c.transcript;
  s.config.validate();
  s.provider = llm::make_provider(s.config);
  s.mock = std::dynamic_pointer_cast<llm::MockProvider>(s.provider);
  auto cache = c.cache_dir.empty() ? std::make_shared<llm::ResponseCache>()
                                   : std::make_shared<llm::ResponseCache>(fs::path(c.cache_dir));
  s.client = std::make_shared<llm::ChatClient>(s.config, s.provider, cache);
  return s;
}

json exchange_line(const std::string& item, const llm::ChatExchange& ex) {
  json j = llm::to_json(ex);
  j["item"] = item;
  return j;
}

template <class Range>
std::string jsonl(const Range& lines) {
  std::string out;
  for (const auto& j : lines) out += j.dump() + "\n";
  return out;
}

void finish_session(const Session& s, const Common& c, std::ostream& err,
                    const std::vector<std::pair<std::string, llm::ChatExchange>>& exchanges) {
  if (s.mock) {
    const auto missing = s.mock->missing_keys();
    if (!missing.empty())
      err << "warning: transcript had no answer for " << missing.size() << " request(s)\n";
  }
  if (!c.record.empty()) {
    std::map<std::string, std::string> transcript;
    for (const auto& [item, ex] : exchanges) transcript[ex.cache_key] = ex.response;
    llm::write_transcript(c.record, transcript);
  }
}

json provider_snapshot(const Session& s) { return s.config.to_json(); }

bench::GoldResolution parse_gold_mode(const std::string& s) {
  if (s == "majority") return bench::GoldResolution::Majority;
  if (s == "first") return bench::GoldResolution::FirstAnnotator;
  if (s == "any") return bench::GoldResolution::AnyAnnotator;
  throw InputError("unknown gold mode '" + s + "' (majority, first, any)");
}

std::vector<bench::MatchMode> modes_for(const std::string& mode) {
  if (mode.empty()) return {bench::MatchMode::Exact, bench::MatchMode::Fuzzy};
  return {bench::parse_mode(mode)};
}

std::string arc_shares_csv(const std::vector<discourse::ArcType>& arcs) {
  std::ostringstream os;
  os << "arc,count,percent\n";
  if (arcs.empty()) return os.str();
  const auto shares = bench::distribution_shares(arcs);
  for (auto arc : discourse::kAllArcs) {
    const auto k = static_cast<std::size_t>(arc);
    os << discourse::arc_key(arc) << ',' << shares.counts[k] << ',' << text::fixed(shares.rounded[k], 1) << '\n';
  }
  return os.str();
}

std::string tp_positions_csv(const std::map<std::string, discourse::TurningPointSet>& positions,
                             const corpus::CorpusStore& corpus) {
  std::ostringstream os;
  os << "series,value\n";
  if (positions.empty()) return os.str();
  const auto summary = bench::tp_position_summary(positions, corpus);
  for (auto tp : discourse::kAllTurningPoints)
    for (double v : summary.relative[tp_index(tp)]) os << discourse::tp_label(tp) << ',' << text::fixed(v, 6) << '\n';
  return os.str();
}

std::string scores_csv(const std::vector<std::pair<std::string, bench::ScoreReport>>& rows) {
  std::ostringstream os;
  bench::write_score_csv(os, rows);
  return os.str();
}

std::string scores_text(const std::vector<std::pair<std::string, bench::ScoreReport>>& rows) {
  std::string out;
  for (const auto& [label, r] : rows) out += bench::format_score_text(label, r);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string corpus, metadata;
  std::uint64_t threshold = corpus::kDefaultPopularityThreshold;
};

int cmd_ingest(const Common& c, const IngestArgs& a, std::ostream& out, std::ostream& err) {
  auto store = corpus::load_corpus(a.corpus);
  RunDir run(c.out);
  json options = {{"corpus", a.corpus}};
  RunManifest m{"ingest", "", report::file_sha256(a.corpus), {}, {}, {}};

  std::vector<corpus::Narrative> kept;
  if (!a.metadata.empty()) {
    std::ifstream in(a.metadata);
    if (!in) throw InputError("cannot open " + a.metadata);
    const auto meta = corpus::read_metadata_csv(in);
    std::set<std::string> known;
    for (const auto& p : meta) known.insert(p.narrative_id);
    std::vector<std::string> unknown;
    for (const auto& n : store)
      if (!known.count(n.id)) unknown.push_back(n.id);
    if (!unknown.empty()) throw InputError("no page metadata for: " + text::join(unknown, ", "));
    const auto part = corpus::popularity_filter(meta, a.threshold);
    const std::set<std::string> keep(part.kept.begin(), part.kept.end());
    for (const auto& n : store)
      if (keep.count(n.id)) kept.push_back(n);
    std::string dropped;
    for (const auto& id : part.dropped)
      if (store.find(id)) dropped += id + "\n";
    run.write("dropped.txt", dropped);
    options["metadata"] = a.metadata;
    options["threshold"] = a.threshold;
    m.inputs["metadata"] = report::file_sha256(a.metadata);
    m.summary["dropped"] = store.size() - kept.size();
  } else {
    kept = store.narratives();
  }
  corpus::CorpusStore filtered(std::move(kept));
  std::ostringstream os;
  corpus::write_corpus(os, filtered);
  run.write("corpus.jsonl", os.str());
  m.summary["narratives"] = filtered.size();
  m.config_hash = write_config_snapshot(run.path(), {{"command", "ingest"}, {"options", options}});
  m.inputs["corpus"] = m.corpus_hash;
  run.finish(std::move(m));
  out << "ingested " << filtered.size() << " of " << store.size() << " narratives\n";
  (void)err;
  return kExitOk;
}

int cmd_rephrase(const Common& c, const std::string& corpus_path, std::ostream& out, std::ostream& err) {
  auto store = corpus::load_corpus(corpus_path);
  auto s = open_session(c);
  RunDir run(c.out);
  const auto& items = store.narratives();
  std::vector<std::optional<corpus::RephraseResult>> results(items.size());
  std::vector<std::string> errors(items.size());
  llm::parallel_for(items.size(), c.workers, [&](std::size_t i) {
    try {
      results[i] = corpus::rephrase_identifiers(items[i], *s.client);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  std::vector<corpus::Narrative> rephrased;
  std::vector<json> subs, failures, exchanges;
  std::vector<std::pair<std::string, llm::ChatExchange>> all_ex;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!results[i]) {
      failures.push_back({{"narrative_id", items[i].id}, {"error", errors[i]}});
      err << "error: " << errors[i] << '\n';
      continue;
    }
    rephrased.push_back(results[i]->narrative);
    subs.push_back({{"narrative_id", items[i].id}, {"substitutions", results[i]->substitutions}});
    for (const auto& ex : results[i]->exchanges) {
      exchanges.push_back(exchange_line(items[i].id, ex));
      all_ex.emplace_back(items[i].id, ex);
    }
  }
  std::ostringstream os;
  corpus::write_corpus(os, corpus::CorpusStore(std::move(rephrased)));
  run.write("corpus.jsonl", os.str());
  run.write("substitutions.jsonl", jsonl(subs));
  run.write("exchanges.jsonl", jsonl(exchanges));
  if (!failures.empty()) run.write("failures.jsonl", jsonl(failures));
  finish_session(s, c, err, all_ex);

  RunManifest m{"rephrase", "", report::file_sha256(corpus_path), {}, {}, {}};
  m.inputs["corpus"] = m.corpus_hash;
  m.config_hash = write_config_snapshot(
      run.path(), {{"command", "rephrase"}, {"provider", provider_snapshot(s)}, {"options", {{"corpus", corpus_path}}}});
  m.summary = {{"rephrased", items.size() - failures.size()}, {"failed", failures.size()}};
  run.finish(std::move(m));
  out << "rephrased " << items.size() - failures.size() << " of " << items.size() << " narratives\n";
  return failures.empty() ? kExitOk : kExitFailure;
}

struct AffectArgs {
  std::string corpus, lexicon;
  std::size_t grid = affect::kDefaultGridSize;
};

int cmd_affect(const Common& c, const AffectArgs& a, std::ostream& out, std::ostream& err) {
  auto store = corpus::load_corpus(a.corpus);
  auto lex = affect::load_lexicon_file(a.lexicon);
  for (const auto& w : lex.warnings) err << "warning: " << w << '\n';
  auto s = open_session(c);
  RunDir run(c.out);

  const auto& items = store.narratives();
  std::vector<std::optional<affect::NarrativeAffect>> results(items.size());
  std::vector<std::string> errors(items.size());
  llm::parallel_for(items.size(), c.workers, [&](std::size_t i) {
    try {
      results[i] = affect::annotate_narrative(items[i], *s.client, lex.lexicon);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  std::vector<json> observations, failures, exchanges;
  std::vector<std::pair<std::string, llm::ChatExchange>> all_ex;
  std::map<std::string, std::map<affect::Dimension, std::vector<affect::AffectCurve>>> by_source;
  std::size_t too_sparse = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& n = items[i];
    if (!results[i]) {
      failures.push_back({{"narrative_id", n.id}, {"error", errors[i]}});
      err << "error: " << n.id << ": " << errors[i] << '\n';
      continue;
    }
    const auto& r = *results[i];
    json obs = json::array();
    for (const auto& o : r.observations) {
      json e = {{"sentence", o.sentence_index}, {"adjectives", o.adjectives}, {"coverage", o.coverage}};
      e["arousal"] = o.arousal ? json(*o.arousal) : json(nullptr);
      e["valence"] = o.valence ? json(*o.valence) : json(nullptr);
      obs.push_back(std::move(e));
    }
    observations.push_back(
        {{"narrative_id", n.id}, {"protagonist", r.protagonist}, {"observations", obs}, {"unparsed", r.unparsed}});
    for (const auto& ex : r.exchanges) {
      exchanges.push_back(exchange_line(n.id, ex));
      all_ex.emplace_back(n.id, ex);
    }
    for (auto dim : {affect::Dimension::Arousal, affect::Dimension::Valence}) {
      if (auto curve = affect::narrative_curve(r, n.sentence_count(), dim, a.grid))
        by_source[n.source][dim].push_back(std::move(*curve));
      else
        ++too_sparse;
    }
  }

  for (auto dim : {affect::Dimension::Arousal, affect::Dimension::Valence}) {
    std::ostringstream os;
    os << "series,x,value\n";
    for (const auto& [source, curves] : by_source) {
      auto it = curves.find(dim);
      if (it == curves.end() || it->second.empty()) continue;
      const auto agg = affect::aggregate(it->second, a.grid);
      for (std::size_t k = 0; k < agg.grid.size(); ++k)
        os << text::csv_field(source) << ',' << text::fixed(agg.grid[k], 6) << ',' << text::fixed(agg.values[k], 6)
           << '\n';
    }
    run.write(std::string(affect::dimension_name(dim)) + "_curve.csv", os.str());
  }
  run.write("observations.jsonl", jsonl(observations));
  run.write("exchanges.jsonl", jsonl(exchanges));
  if (!failures.empty()) run.write("failures.jsonl", jsonl(failures));
  run.add_outputs(render_run(run.path()));
  finish_session(s, c, err, all_ex);

  RunManifest m{"affect", "", report::file_sha256(a.corpus), {}, {}, {}};
  m.inputs = {{"corpus", m.corpus_hash}, {"lexicon", report::file_sha256(a.lexicon)}};
  m.config_hash = write_config_snapshot(run.path(), {{"command", "affect"},
                                                     {"provider", provider_snapshot(s)},
                                                     {"options", {{"corpus", a.corpus}, {"lexicon", a.lexicon}, {"grid", a.grid}}}});
  m.summary = {{"narratives", items.size()}, {"failed", failures.size()}, {"curves_skipped", too_sparse}};
  run.finish(std::move(m));
  out << "annotated " << items.size() - failures.size() << " of " << items.size() << " narratives\n";
  return kExitOk;
}

struct BenchArgs {
  std::string corpus, gold, variant = "plain", mode, gold_mode = "majority", label;
};

int cmd_bench(bool arc_task, const Common& c, const BenchArgs& a, std::ostream& out, std::ostream& err) {
  auto store = corpus::load_corpus(a.corpus);
  const auto annotations = bench::load_annotations(a.gold);
  bench::validate_annotations(annotations, store);
  const auto gold = bench::resolve_all(annotations, parse_gold_mode(a.gold_mode));
  const auto modes = modes_for(a.mode);
  auto s = open_session(c);
  RunDir run(c.out);

  bench::TaskOptions opts;
  opts.workers = c.workers;
  bench::TaskRun result;
  if (arc_task) {
    if (a.variant != "plain" && a.variant != "with_tp_descriptions")
      throw InputError("bench-arc variant must be plain or with_tp_descriptions");
    result = bench::run_arc_task(store, gold, *s.client,
                                 a.variant == "plain" ? bench::ArcVariant::Plain : bench::ArcVariant::WithTpDescriptions, opts);
  } else {
    if (a.variant != "plain" && a.variant != "with_arc_prior")
      throw InputError("bench-tp variant must be plain or with_arc_prior");
    result = bench::run_tp_task(store, gold, *s.client,
                                a.variant == "plain" ? bench::TpVariant::Plain : bench::TpVariant::WithArcPrior, opts);
  }

  bench::GoldMap scored_gold;
  for (const auto& p : result.predictions) scored_gold.emplace(p.narrative_id, gold.at(p.narrative_id));
  const bench::ScoreTargets targets{arc_task, !arc_task};
  const std::string label = a.label.empty() ? s.config.name + "/" + a.variant : a.label;
  std::vector<std::pair<std::string, bench::ScoreReport>> rows;
  for (auto mode : modes) rows.emplace_back(label, bench::score(result.predictions, scored_gold, mode, targets));

  std::ostringstream preds;
  bench::write_predictions_jsonl(preds, result.predictions);
  run.write("predictions.jsonl", preds.str());
  run.write("scores.csv", scores_csv(rows));
  run.write("scores.txt", scores_text(rows));

  std::vector<json> skipped, exchanges, errors;
  for (const auto& sk : result.skipped) {
    skipped.push_back({{"narrative_id", sk.narrative_id}, {"reason", sk.reason}});
    err << "skipped " << sk.narrative_id << ": " << sk.reason << '\n';
  }
  for (const auto& p : result.predictions)
    if (p.abstained) errors.push_back({{"narrative_id", p.narrative_id}, {"error", p.error}});
  std::vector<std::pair<std::string, llm::ChatExchange>> all_ex;
  for (const auto& ie : result.exchanges) {
    exchanges.push_back(exchange_line(ie.narrative_id, ie.exchange));
    all_ex.emplace_back(ie.narrative_id, ie.exchange);
  }
  run.write("exchanges.jsonl", jsonl(exchanges));
  if (!skipped.empty()) run.write("skipped.jsonl", jsonl(skipped));
  if (!errors.empty()) run.write("abstentions.jsonl", jsonl(errors));

  if (arc_task) {
    std::vector<discourse::ArcType> arcs;
    for (const auto& p : result.predictions)
      if (p.arc && !p.abstained) arcs.push_back(*p.arc);
    run.write("arc_shares.csv", arc_shares_csv(arcs));
  } else {
    std::map<std::string, discourse::TurningPointSet> positions;
    for (const auto& p : result.predictions)
      if (p.tps && !p.abstained) positions.emplace(p.narrative_id, *p.tps);
    run.write("tp_positions.csv", tp_positions_csv(positions, store));
  }
  run.add_outputs(render_run(run.path()));
  finish_session(s, c, err, all_ex);

  const std::string command = arc_task ? "bench-arc" : "bench-tp";
  RunManifest m{command, "", report::file_sha256(a.corpus), {}, {}, {}};
  m.inputs = {{"corpus", m.corpus_hash}, {"gold", report::file_sha256(a.gold)}};
  if (!c.transcript.empty()) m.inputs["transcript"] = report::file_sha256(c.transcript);
  m.config_hash = write_config_snapshot(
      run.path(), {{"command", command},
                   {"provider", provider_snapshot(s)},
                   {"options", {{"corpus", a.corpus}, {"gold", a.gold}, {"variant", a.variant},
                                {"mode", a.mode.empty() ? "exact+fuzzy" : a.mode}, {"gold_mode", a.gold_mode}}}});
  m.summary = {{"items", result.predictions.size()}, {"skipped", result.skipped.size()}, {"abstentions", errors.size()}};
  run.finish(std::move(m));
  out << scores_text(rows);
  return kExitOk;
}

struct ScoreArgs {
  std::string predictions, gold, mode, gold_mode = "majority", label = "predictions", out;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.predictions);
  if (!in) throw InputError("cannot open " + a.predictions);
  const auto preds = bench::read_predictions_jsonl(in);
  const auto gold = bench::resolve_all(bench::load_annotations(a.gold), parse_gold_mode(a.gold_mode));
  const auto diff = bench::id_difference(preds, gold);
  if (!diff.empty()) {
    err << "error: prediction and gold ids differ\n";
    for (const auto& d : diff) err << "  " << d << '\n';
    return kExitFailure;
  }
  std::vector<std::pair<std::string, bench::ScoreReport>> rows;
  for (auto mode : modes_for(a.mode)) rows.emplace_back(a.label, bench::score(preds, gold, mode));
  if (a.out.empty()) {
    out << scores_csv(rows);
    return kExitOk;
  }
  RunDir run(a.out);
  run.write("scores.csv", scores_csv(rows));
  run.write("scores.txt", scores_text(rows));
  run.add_outputs(render_run(run.path()));
  RunManifest m{"score", "", "", {}, {}, {}};
  m.inputs = {{"predictions", report::file_sha256(a.predictions)}, {"gold", report::file_sha256(a.gold)}};
  m.config_hash = write_config_snapshot(
      run.path(), {{"command", "score"},
                   {"options", {{"predictions", a.predictions}, {"gold", a.gold}, {"gold_mode", a.gold_mode},
                                {"mode", a.mode.empty() ? "exact+fuzzy" : a.mode}}}});
  run.finish(std::move(m));
  out << scores_text(rows);
  return kExitOk;
}

struct AgreementArgs {
  std::string annotations, corpus, out;
};

int cmd_agreement(const AgreementArgs& a, std::ostream& out, std::ostream& err) {
  const auto records = bench::load_annotations(a.annotations);
  RunDir run(a.out);
  RunManifest m{"agreement", "", "", {}, {}, {}};
  m.inputs["annotations"] = report::file_sha256(a.annotations);

  std::optional<corpus::CorpusStore> store;
  if (!a.corpus.empty()) {
    store = corpus::load_corpus(a.corpus);
    bench::validate_annotations(records, *store);
    m.corpus_hash = report::file_sha256(a.corpus);
    m.inputs["corpus"] = m.corpus_hash;
  }

  json summary;
  try {
    const auto ag = bench::inter_annotator_agreement(records);
    summary = {{"narratives", ag.narratives}, {"rater_pairs", ag.rater_pairs}, {"arc_kappa", ag.arc_kappa},
               {"tp_spearman", ag.tp_spearman}};
    out << "Cohen's kappa (arcs): " << text::fixed(ag.arc_kappa, 3) << '\n'
        << "Spearman (TP positions): " << text::fixed(ag.tp_spearman, 3) << '\n';
    std::vector<std::pair<std::string, bench::ScoreReport>> rows;
    for (auto mode : {bench::MatchMode::Exact, bench::MatchMode::Fuzzy})
      rows.emplace_back("human (leave-one-annotator-out)", bench::human_baseline(records, mode));
    run.write("scores.csv", scores_csv(rows));
    run.write("scores.txt", scores_text(rows));
    out << scores_text(rows);
  } catch (const InsufficientDataError& e) {
    err << "warning: " << e.what() << "; agreement statistics skipped\n";
    summary = {{"narratives", 0}};
  } catch (const UndefinedError& e) {
    err << "warning: " << e.what() << "; agreement statistics skipped\n";
    summary = {{"undefined", e.what()}};
  }
  run.write("agreement.json", summary.dump(2) + "\n");

  const auto gold = bench::resolve_all(records);
  std::vector<discourse::ArcType> arcs;
  std::map<std::string, discourse::TurningPointSet> positions;
  for (const auto& [id, g] : gold) {
    if (g.arc) arcs.push_back(*g.arc);
    positions.emplace(id, g.tps);
  }
  run.write("arc_shares.csv", arc_shares_csv(arcs));
  if (store) run.write("tp_positions.csv", tp_positions_csv(positions, *store));
  run.add_outputs(render_run(run.path()));

  m.config_hash = write_config_snapshot(
      run.path(), {{"command", "agreement"}, {"options", {{"annotations", a.annotations}, {"corpus", a.corpus}}}});
  m.summary = summary;
  run.finish(std::move(m));
  return kExitOk;
}

struct GenerateArgs {
  std::string specs;
  bool judge_arcs = false;
  bool bundle = false;
  gen::LengthTargets lengths;
};

int cmd_generate(const Common& c, const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.specs);
  if (!in) throw InputError("cannot open " + a.specs);
  const auto specs = gen::read_specs_jsonl(in);
  auto s = open_session(c);
  RunDir run(c.out);
  const auto outcomes = gen::generate_all(specs, *s.client, c.workers, a.lengths);

  std::vector<gen::GeneratedStory> stories;
  std::vector<json> lines, failures, exchanges;
  std::vector<std::pair<std::string, llm::ChatExchange>> all_ex;
  for (const auto& o : outcomes) {
    if (!o.story) {
      failures.push_back({{"spec_id", o.spec_id}, {"error", o.error}});
      err << "error: " << o.error << '\n';
      continue;
    }
    lines.push_back(gen::to_json(*o.story));
    for (const auto& ex : o.story->exchanges) {
      exchanges.push_back(exchange_line(o.spec_id, ex));
      all_ex.emplace_back(o.spec_id, ex);
    }
    stories.push_back(*o.story);
  }
  run.write("stories.jsonl", jsonl(lines));
  if (!failures.empty()) run.write("failures.jsonl", jsonl(failures));

  json summary = {{"specs", specs.size()}, {"generated", stories.size()}, {"failed", failures.size()}};
  if (a.judge_arcs) {
    std::vector<gen::GeneratedStory> requested;
    for (const auto& st : stories)
      if (st.spec.requested_arc) requested.push_back(st);
    if (!requested.empty()) {
      const auto table = gen::requested_arc_success(requested, gen::model_arc_judge(*s.client));
      std::ostringstream os;
      gen::write_arc_success_csv(os, table);
      run.write("arc_success.csv", os.str());
      summary["arc_success_average"] = table.average;
    }
  }
  if (a.bundle && !stories.empty()) {
    gen::export_bundle(stories, run.path() / "bundle", c.seed);
    for (std::size_t i = 1; i <= stories.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "bundle/stories/story_%03zu.txt", i);
      run.add_outputs({name});
    }
    run.add_outputs({"bundle/manifest.json", "bundle/key.json"});
  }
  run.write("exchanges.jsonl", jsonl(exchanges));
  run.add_outputs(render_run(run.path()));
  finish_session(s, c, err, all_ex);

  RunManifest m{"generate", "", "", {}, {}, summary};
  m.inputs["specs"] = report::file_sha256(a.specs);
  m.config_hash = write_config_snapshot(
      run.path(), {{"command", "generate"},
                   {"provider", provider_snapshot(s)},
                   {"options", {{"specs", a.specs}, {"judge_arcs", a.judge_arcs}, {"bundle", a.bundle}, {"seed", c.seed},
                                {"outline_beats", a.lengths.outline_beats}, {"story_sentences", a.lengths.story_sentences}}}});
  run.finish(std::move(m));
  out << "generated " << stories.size() << " of " << specs.size() << " stories\n";
  return failures.empty() ? kExitOk : kExitFailure;
}

struct JudgeArgs {
  std::string rankings, pairs, out;
};

int cmd_judge_ingest(const JudgeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.rankings.empty() && a.pairs.empty()) throw InputError("judge-ingest needs --rankings and/or --pairs");
  RunDir run(a.out);
  RunManifest m{"judge-ingest", "", "", {}, {}, {}};
  if (!a.rankings.empty()) {
    std::ifstream in(a.rankings);
    if (!in) throw InputError("cannot open " + a.rankings);
    const auto table = gen::tabulate_rankings(gen::read_rankings_csv(in));
    std::ostringstream os;
    gen::write_ranking_table_csv(os, table);
    run.write("ranking_table.csv", os.str());
    out << os.str();
    m.inputs["rankings"] = report::file_sha256(a.rankings);
  }
  if (!a.pairs.empty()) {
    std::ifstream in(a.pairs);
    if (!in) throw InputError("cannot open " + a.pairs);
    const auto table = gen::tabulate_pairs(gen::read_pairs_csv(in));
    for (const auto& w : table.warnings) err << "warning: " << w << '\n';
    std::ostringstream os;
    gen::write_pair_table_csv(os, table);
    run.write("pair_table.csv", os.str());
    out << os.str();
    m.inputs["pairs"] = report::file_sha256(a.pairs);
    m.summary["warnings"] = table.warnings;
  }
  run.add_outputs(render_run(run.path()));
  m.config_hash = write_config_snapshot(
      run.path(), {{"command", "judge-ingest"}, {"options", {{"rankings", a.rankings}, {"pairs", a.pairs}}}});
  run.finish(std::move(m));
  return kExitOk;
}

int cmd_report(const std::string& run_dir, std::ostream& out) {
  const auto charts = render_run(run_dir);
  const fs::path manifest_path = fs::path(run_dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json m = json::parse(in);
    std::set<std::string> outputs;
    for (const auto& o : m.value("outputs", json::array())) outputs.insert(o.get<std::string>());
    outputs.insert(charts.begin(), charts.end());
    m["outputs"] = outputs;
    write_text(manifest_path, m.dump(2) + "\n");
  }
  for (const auto& c : charts) out << c << '\n';
  if (charts.empty()) out << "no chart data found in " << run_dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Narrative discourse toolkit: corpus, affect, benchmark, generation and reporting pipelines",
               "narrative"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  Common common;

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Validate a corpus and apply the popularity filter");
  s_ingest->add_option("--corpus", ingest.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  s_ingest->add_option("--metadata", ingest.metadata, "Page metadata CSV")->check(CLI::ExistingFile);
  s_ingest->add_option("--threshold", ingest.threshold, "Keep pages shorter than this many bytes");
  add_output(s_ingest, common);

  std::string rephrase_corpus;
  auto* s_rephrase = app.add_subcommand("rephrase", "Replace identifiers in every narrative");
  s_rephrase->add_option("--corpus", rephrase_corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  add_provider(s_rephrase, common);
  add_output(s_rephrase, common);

  AffectArgs aff;
  auto* s_affect = app.add_subcommand("affect", "Arousal and valence curves from model-inferred adjectives");
  s_affect->add_option("--corpus", aff.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  s_affect->add_option("--lexicon", aff.lexicon, "VAD lexicon (tab separated)")->required()->check(CLI::ExistingFile);
  s_affect->add_option("--grid", aff.grid, "Curve sample count")->check(CLI::Range(2, 100000));
  add_provider(s_affect, common);
  add_output(s_affect, common);

  BenchArgs barc, btp;
  const auto add_bench = [&](const char* name, const char* help, BenchArgs& b, const char* variants) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--corpus", b.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    sub->add_option("--gold", b.gold, "Annotation CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--variant", b.variant, variants);
    sub->add_option("--mode", b.mode, "exact or fuzzy (default: both)")->check(CLI::IsMember({"exact", "fuzzy"}));
    sub->add_option("--gold-mode", b.gold_mode, "majority, first or any")
        ->check(CLI::IsMember({"majority", "first", "any"}));
    sub->add_option("--label", b.label, "Row label in the score table");
    add_provider(sub, common);
    add_output(sub, common);
    return sub;
  };
  auto* s_barc = add_bench("bench-arc", "Story arc identification benchmark", barc, "plain or with_tp_descriptions");
  auto* s_btp = add_bench("bench-tp", "Turning point identification benchmark", btp, "plain or with_arc_prior");

  ScoreArgs sc;
  auto* s_score = app.add_subcommand("score", "Score a predictions file against annotations");
  s_score->add_option("--predictions", sc.predictions, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  s_score->add_option("--gold", sc.gold, "Annotation CSV")->required()->check(CLI::ExistingFile);
  s_score->add_option("--mode", sc.mode, "exact or fuzzy (default: both)")->check(CLI::IsMember({"exact", "fuzzy"}));
  s_score->add_option("--gold-mode", sc.gold_mode, "majority, first or any")
      ->check(CLI::IsMember({"majority", "first", "any"}));
  s_score->add_option("--label", sc.label, "Row label");
  s_score->add_option("--out", sc.out, "Run directory (default: CSV to stdout)");

  AgreementArgs ag;
  auto* s_agree = app.add_subcommand("agreement", "Inter-annotator agreement and human baseline");
  s_agree->add_option("--annotations", ag.annotations, "Annotation CSV")->required()->check(CLI::ExistingFile);
  s_agree->add_option("--corpus", ag.corpus, "Corpus JSONL (enables TP position summaries)")->check(CLI::ExistingFile);
  s_agree->add_option("--out", ag.out, "Run directory")->required();

  GenerateArgs ga;
  auto* s_gen = app.add_subcommand("generate", "Plan-first story generation");
  s_gen->add_option("--specs", ga.specs, "Generation spec JSONL")->required()->check(CLI::ExistingFile);
  s_gen->add_flag("--judge-arcs", ga.judge_arcs, "Judge requested arcs with the arc identification prompt");
  s_gen->add_flag("--bundle", ga.bundle, "Export a shuffled blind-evaluation bundle");
  s_gen->add_option("--outline-beats", ga.lengths.outline_beats, "Outline length target");
  s_gen->add_option("--story-sentences", ga.lengths.story_sentences, "Story length target");
  add_provider(s_gen, common);
  add_seed(s_gen, common);
  add_output(s_gen, common);

  JudgeArgs ja;
  auto* s_judge = app.add_subcommand("judge-ingest", "Tabulate human ranking and pairwise judgments");
  s_judge->add_option("--rankings", ja.rankings, "Ranking CSV")->check(CLI::ExistingFile);
  s_judge->add_option("--pairs", ja.pairs, "Pairwise CSV")->check(CLI::ExistingFile);
  s_judge->add_option("--out", ja.out, "Run directory")->required();

  std::string report_run;
  auto* s_report = app.add_subcommand("report", "Render charts for a run directory");
  s_report->add_option("--run", report_run, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s_ingest) return cmd_ingest(common, ingest, out, err);
    if (*s_rephrase) return cmd_rephrase(common, rephrase_corpus, out, err);
    if (*s_affect) return cmd_affect(common, aff, out, err);
    if (*s_barc) return cmd_bench(true, common, barc, out, err);
    if (*s_btp) return cmd_bench(false, common, btp, out, err);
    if (*s_score) return cmd_score(sc, out, err);
    if (*s_agree) return cmd_agreement(ag, out, err);
    if (*s_gen) return cmd_generate(common, ga, out, err);
    if (*s_judge) return cmd_judge_ingest(ja, out, err);
    if (*s_report) return cmd_report(report_run, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace narrative::report
