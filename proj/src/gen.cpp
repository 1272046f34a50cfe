#include "narrative/gen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "narrative/llm/parallel.hpp"
#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"
#include "narrative/text.hpp"

namespace narrative::gen {

using llm::json;

namespace {

constexpr std::array<std::string_view, 4> kStrategyKeys = {"outline_only", "self_tp", "human_tp", "arc_enhanced"};
constexpr std::array<std::string_view, 3> kCriterionKeys = {"suspense", "emotion_provoking", "overall_preference"};
constexpr std::array<std::string_view, 5> kAspectKeys = {"theme", "setting", "conflict", "character", "overall"};
constexpr std::array<std::string_view, 3> kVerdictKeys = {"outline_only", "tie", "arc_enhanced"};

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& keys, std::string_view s) {
  const auto t = text::to_lower(text::trim(s));
  for (std::size_t i = 0; i < N; ++i)
    if (keys[i] == t) return static_cast<E>(i);
  return std::nullopt;
}

constexpr std::array<std::string_view, 3> kTpTags = {"[TP3]", "[TP4]", "[TP5]"};

bool has_tag(const std::string& beat, std::string_view tag) {
  return text::to_lower(beat.substr(0, tag.size())) == text::to_lower(tag);
}

std::string numbered(std::span<const std::string> lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + lines[i];
  }
  return out;
}

const std::string& field(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_string()) throw ParseError(std::string("missing string field \"") + name + "\"");
  return j[name].get_ref<const std::string&>();
}

std::optional<std::string> optional_field(const json& j, const char* name) {
  if (!j.contains(name) || j[name].is_null()) return std::nullopt;
  if (!j[name].is_string()) throw ParseError(std::string("\"") + name + "\" must be a string");
  return j[name].get<std::string>();
}

}  // namespace

std::string_view strategy_key(Strategy s) { return kStrategyKeys[static_cast<std::size_t>(s)]; }

Strategy parse_strategy(std::string_view s) {
  if (auto v = lookup<Strategy>(kStrategyKeys, s)) return *v;
  throw InputError("unknown strategy '" + std::string(s) + "'");
}

void GenerationSpec::validate() const {
  if (text::trim(id).empty()) throw InputError("generation spec needs an id");
  try {
    premise.validate();
  } catch (const InputError& e) {
    throw InputError("spec " + id + ": " + e.what());
  }
  const bool arc_needed = strategy == Strategy::ArcEnhanced;
  if (arc_needed && !requested_arc) throw InputError("spec " + id + ": arc_enhanced requires requested_arc");
  if (!arc_needed && requested_arc)
    throw InputError("spec " + id + ": requested_arc is only valid for arc_enhanced");
  const bool human_needed = strategy == Strategy::HumanTp;
  const auto present = [](const std::optional<std::string>& s) { return s && !text::trim(*s).empty(); };
  if (human_needed && !(present(human_setback) && present(human_climax)))
    throw InputError("spec " + id + ": human_tp requires human_setback and human_climax");
  if (!human_needed && (human_setback || human_climax))
    throw InputError("spec " + id + ": human_setback/human_climax are only valid for human_tp");
}

json to_json(const GenerationSpec& spec) {
  json j = {{"id", spec.id},
            {"strategy", std::string(strategy_key(spec.strategy))},
            {"title", spec.premise.title},
            {"genre", spec.premise.genre},
            {"setting", spec.premise.initial_setting}};
  if (spec.requested_arc) j["requested_arc"] = std::string(discourse::arc_key(*spec.requested_arc));
  if (spec.human_setback) j["human_setback"] = *spec.human_setback;
  if (spec.human_climax) j["human_climax"] = *spec.human_climax;
  return j;
}

GenerationSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("generation spec must be a JSON object");
  GenerationSpec s;
  s.id = field(j, "id");
  s.strategy = parse_strategy(field(j, "strategy"));
  s.premise.title = field(j, "title");
  s.premise.genre = field(j, "genre");
  s.premise.initial_setting = field(j, "setting");
  if (auto arc = optional_field(j, "requested_arc")) s.requested_arc = discourse::parse_arc_name(*arc);
  s.human_setback = optional_field(j, "human_setback");
  s.human_climax = optional_field(j, "human_climax");
  return s;
}

std::vector<GenerationSpec> read_specs_jsonl(std::istream& in) {
  std::vector<GenerationSpec> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    GenerationSpec spec;
    try {
      spec = spec_from_json(json::parse(line));
      spec.validate();
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(spec.id).second)
      throw ConflictError("line " + std::to_string(line_no) + ": duplicate spec id " + spec.id);
    out.push_back(std::move(spec));
  }
  return out;
}

json to_json(const GeneratedStory& story) {
  json j = {{"spec", to_json(story.spec)}, {"outline", story.outline}, {"story", corpus::to_json(story.story)}};
  if (story.marked_tps) {
    j["marked_tps"] = {{"tp3", (*story.marked_tps)[0]}, {"tp4", (*story.marked_tps)[1]}, {"tp5", (*story.marked_tps)[2]}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Prompts and parsing
// ---------------------------------------------------------------------------

llm::Messages outline_prompt(const GenerationSpec& spec, const LengthTargets& lengths) {
  using discourse::TurningPoint;
  static constexpr std::array<TurningPoint, 3> kLateTps = {TurningPoint::PointOfNoReturn, TurningPoint::MajorSetback,
                                                           TurningPoint::Climax};
  llm::Bindings b = {{"genre", spec.premise.genre},
                     {"title", spec.premise.title},
                     {"setting", spec.premise.initial_setting},
                     {"outline_beats", lengths.outline_beats}};
  llm::TemplateName name = llm::TemplateName::OutlineOnly;
  switch (spec.strategy) {
    case Strategy::OutlineOnly:
      break;
    case Strategy::SelfTp:
      name = llm::TemplateName::SelfTpOutline;
      b["tp_definitions"] = llm::tp_definitions(kLateTps);
      break;
    case Strategy::HumanTp:
      name = llm::TemplateName::HumanTpOutline;
      b["tp_definitions"] = llm::tp_definitions(kLateTps);
      b["human_setback"] = spec.human_setback.value_or("");
      b["human_climax"] = spec.human_climax.value_or("");
      break;
    case Strategy::ArcEnhanced: {
      name = llm::TemplateName::ArcEnhanced;
      for (auto& [k, v] : llm::arc_shape_bindings(*spec.requested_arc)) b[k] = v;
      break;
    }
  }
  return llm::render(llm::get_template(name), b);
}

llm::Messages expansion_prompt(const GenerationSpec& spec, std::span<const std::string> outline,
                               const LengthTargets& lengths) {
  const bool tps = spec.strategy == Strategy::SelfTp || spec.strategy == Strategy::HumanTp;
  llm::Bindings b = {{"genre", spec.premise.genre},
                     {"title", spec.premise.title},
                     {"outline", numbered(outline)},
                     {"story_sentences", lengths.story_sentences}};
  if (tps) {
    b["tp_instruction"] =
        " Keep the beats tagged [TP3], [TP4] and [TP5] as turning points and report the 1-based index of the "
        "sentence where each of them happens. Do not include the tags in the story.";
    b["answer_format"] =
        "{\"story\": [\"<sentence>\", ...], \"turning_points\": {\"tp3\": <index>, \"tp4\": <index>, "
        "\"tp5\": <index>}}";
  } else {
    b["tp_instruction"] = "";
    b["answer_format"] = "{\"story\": [\"<sentence>\", ...]}";
  }
  return llm::render(llm::get_template(llm::TemplateName::ExpandOutline), b);
}

std::vector<std::string> parse_outline(std::string_view text, Strategy strategy) {
  auto beats = llm::parse_string_list(text, "outline");
  if (strategy == Strategy::SelfTp || strategy == Strategy::HumanTp) {
    for (auto tag : kTpTags) {
      const auto n = std::count_if(beats.begin(), beats.end(), [&](const std::string& b) { return has_tag(b, tag); });
      if (n != 1)
        throw ParseError("outline must tag exactly one beat with " + std::string(tag) + ", found " + std::to_string(n));
    }
  }
  return beats;
}

std::vector<std::string> replace_human_tps(std::vector<std::string> outline, const std::string& setback,
                                           const std::string& climax) {
  bool done4 = false, done5 = false;
  for (auto& beat : outline) {
    if (has_tag(beat, kTpTags[1])) {
      beat = std::string(kTpTags[1]) + " " + text::collapse_whitespace(setback);
      done4 = true;
    } else if (has_tag(beat, kTpTags[2])) {
      beat = std::string(kTpTags[2]) + " " + text::collapse_whitespace(climax);
      done5 = true;
    }
  }
  if (!done4 || !done5) throw InputError("outline lacks a [TP4] or [TP5] beat to replace");
  return outline;
}

Expansion parse_expansion(std::string_view text, bool expect_tps) {
  Expansion e;
  e.sentences = llm::parse_string_list(text, "story");
  if (e.sentences.size() < corpus::kMinSentences)
    throw ParseError("story has " + std::to_string(e.sentences.size()) + " sentences, need at least " +
                     std::to_string(corpus::kMinSentences));
  if (!expect_tps) return e;

  auto j = llm::extract_json_object(text);
  if (!j || !j->contains("turning_points") || !(*j)["turning_points"].is_object())
    throw ParseError("expected \"turning_points\" with tp3, tp4 and tp5");
  const auto& t = (*j)["turning_points"];
  MarkedTps m{};
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string key = "tp" + std::to_string(k + 3);
    if (!t.contains(key) || !t[key].is_number_integer()) throw ParseError("turning_points." + key + " must be an integer");
    const long v = t[key].get<long>();
    if (v < 1 || v > static_cast<long>(e.sentences.size()))
      throw ParseError("turning_points." + key + " = " + std::to_string(v) + " outside [1, " +
                       std::to_string(e.sentences.size()) + "]");
    m[k] = static_cast<int>(v);
  }
  e.marked_tps = m;
  return e;
}

GeneratedStory generate(const GenerationSpec& spec, llm::ChatClient& client, const LengthTargets& lengths,
                        int repairs) {
  spec.validate();
  GeneratedStory out;
  out.spec = spec;

  const auto phase = [&](const char* name, llm::Messages messages, auto parse) {
    try {
      auto r = llm::complete_structured<decltype(parse(std::string()))>(
          client, std::move(messages), parse, llm::TaskKind::Generation, repairs);
      out.exchanges.insert(out.exchanges.end(), r.exchanges.begin(), r.exchanges.end());
      if (!r.value) throw GenerationError(spec.id, name, "unparseable answer: " + r.error);
      return std::move(*r.value);
    } catch (const llm::ProviderError& e) {
      throw GenerationError(spec.id, name, std::string("provider error: ") + e.what());
    }
  };

  out.outline = phase("outline", outline_prompt(spec, lengths),
                      [&](const std::string& t) { return parse_outline(t, spec.strategy); });
  if (spec.strategy == Strategy::HumanTp)
    out.outline = replace_human_tps(std::move(out.outline), *spec.human_setback, *spec.human_climax);

  const bool tps = spec.strategy == Strategy::SelfTp || spec.strategy == Strategy::HumanTp;
  auto expansion = phase("expansion", expansion_prompt(spec, out.outline, lengths),
                         [&](const std::string& t) { return parse_expansion(t, tps); });
  out.story = corpus::make_narrative(spec.id, spec.premise.title, spec.premise.genre, client.config().model,
                                     expansion.sentences);
  out.marked_tps = expansion.marked_tps;
  return out;
}

std::vector<GenerationOutcome> generate_all(std::span<const GenerationSpec> specs, llm::ChatClient& client,
                                            std::size_t workers, const LengthTargets& lengths, int repairs) {
  std::vector<GenerationOutcome> out(specs.size());
  llm::parallel_for(specs.size(), workers, [&](std::size_t i) {
    out[i].spec_id = specs[i].id;
    try {
      out[i].story = generate(specs[i], client, lengths, repairs);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Requested-arc success
// ---------------------------------------------------------------------------

ArcJudge model_arc_judge(llm::ChatClient& client) {
  return [&client](const GeneratedStory& s) -> std::optional<ArcType> {
    try {
      auto r = llm::complete_structured<ArcType>(client, llm::arc_identify_prompt(s.story.texts()),
                                                 [](const std::string& t) { return llm::parse_arc(t); });
      return r.value;
    } catch (const llm::ProviderError&) {
      return std::nullopt;
    }
  };
}

ArcSuccessTable requested_arc_success(std::span<const std::pair<ArcType, std::optional<ArcType>>> judged) {
  ArcSuccessTable t;
  t.stories = judged.size();
  for (const auto& [requested, verdict] : judged) {
    const auto k = static_cast<std::size_t>(requested);
    ++t.requested[k];
    if (verdict && *verdict == requested) ++t.satisfied[k];
  }
  double sum = 0;
  std::size_t arcs = 0;
  for (std::size_t k = 0; k < 7; ++k) {
    if (t.requested[k] == 0) continue;
    t.accuracy[k] = 100.0 * static_cast<double>(t.satisfied[k]) / static_cast<double>(t.requested[k]);
    sum += *t.accuracy[k];
    ++arcs;
  }
  if (arcs) t.average = sum / static_cast<double>(arcs);
  return t;
}

ArcSuccessTable requested_arc_success(std::span<const GeneratedStory> stories, const ArcJudge& judge) {
  std::vector<std::pair<ArcType, std::optional<ArcType>>> judged;
  for (const auto& s : stories) {
    if (!s.spec.requested_arc) throw InputError("story " + s.spec.id + " has no requested arc");
    judged.emplace_back(*s.spec.requested_arc, judge(s));
  }
  return requested_arc_success(judged);
}

void write_arc_success_csv(std::ostream& out, const ArcSuccessTable& t) {
  out << "arc,requested,satisfied,accuracy\n";
  for (auto arc : discourse::kAllArcs) {
    const auto k = static_cast<std::size_t>(arc);
    out << discourse::arc_key(arc) << ',' << t.requested[k] << ',' << t.satisfied[k] << ','
        << (t.accuracy[k] ? text::fixed(*t.accuracy[k], 1) : "") << '\n';
  }
  std::size_t req = 0, sat = 0;
  for (std::size_t k = 0; k < 7; ++k) req += t.requested[k], sat += t.satisfied[k];
  out << "Average," << req << ',' << sat << ',' << text::fixed(t.average, 1) << '\n';
}

// ---------------------------------------------------------------------------
// Judgments
// ---------------------------------------------------------------------------

std::string_view criterion_key(Criterion c) { return kCriterionKeys[static_cast<std::size_t>(c)]; }

Criterion parse_criterion(std::string_view s) {
  if (auto v = lookup<Criterion>(kCriterionKeys, s)) return *v;
  throw InputError("unknown criterion '" + std::string(s) + "'");
}

std::string_view aspect_key(Aspect a) { return kAspectKeys[static_cast<std::size_t>(a)]; }

Aspect parse_aspect(std::string_view s) {
  if (auto v = lookup<Aspect>(kAspectKeys, s)) return *v;
  throw InputError("unknown aspect '" + std::string(s) + "'");
}

std::string_view verdict_key(Verdict v) { return kVerdictKeys[static_cast<std::size_t>(v)]; }

Verdict parse_verdict(std::string_view s) {
  if (auto v = lookup<Verdict>(kVerdictKeys, s)) return *v;
  throw InputError("unknown verdict '" + std::string(s) + "'");
}

void RankJudgment::validate() const {
  std::set<Strategy> seen(ranking.begin(), ranking.end());
  const bool ok = seen.size() == 3 && std::all_of(ranking.begin(), ranking.end(), [](Strategy s) {
                    return std::find(kRankedStrategies.begin(), kRankedStrategies.end(), s) != kRankedStrategies.end();
                  });
  if (!ok) {
    throw InputError("judgment " + item_id + "/" + judge_id + "/" + std::string(criterion_key(criterion)) +
                     ": ranking must be a permutation of outline_only, self_tp, human_tp");
  }
}

namespace {

template <class T, class Parse>
T parse_cell(Parse&& parse, const std::string& value, std::size_t line) {
  try {
    return parse(value);
  } catch (const InputError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

std::vector<RankJudgment> read_rankings_csv(std::istream& in) {
  const auto t = text::read_csv(in);
  const auto c_item = t.column("item_id"), c_judge = t.column("judge_id"), c_crit = t.column("criterion");
  const std::array<std::size_t, 3> c_rank = {t.column("best"), t.column("medium"), t.column("worst")};
  std::vector<RankJudgment> out;
  std::set<std::tuple<std::string, std::string, Criterion>> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto line = t.lines[r];
    RankJudgment j;
    j.item_id = text::trim(row[c_item]);
    j.judge_id = text::trim(row[c_judge]);
    j.criterion = parse_cell<Criterion>(parse_criterion, row[c_crit], line);
    for (std::size_t k = 0; k < 3; ++k) j.ranking[k] = parse_cell<Strategy>(parse_strategy, row[c_rank[k]], line);
    try {
      j.validate();
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line) + ": " + e.what());
    }
    if (!seen.emplace(j.item_id, j.judge_id, j.criterion).second)
      throw ConflictError("line " + std::to_string(line) + ": repeated judgment for " + j.item_id + "/" + j.judge_id +
                          "/" + std::string(criterion_key(j.criterion)));
    out.push_back(std::move(j));
  }
  return out;
}

RankingTable tabulate_rankings(std::span<const RankJudgment> judgments) {
  if (judgments.empty()) throw InputError("tabulate_rankings: no judgments");
  RankingTable table;
  for (const auto& j : judgments) {
    j.validate();
    auto& by_strategy = table[j.criterion];
    for (std::size_t place = 0; place < 3; ++place) {
      auto& s = by_strategy[j.ranking[place]];
      ++s.judgments;
      ++s.counts[place];
    }
  }
  for (auto& [criterion, by_strategy] : table) {
    for (auto& [strategy, s] : by_strategy) {
      for (std::size_t place = 0; place < 3; ++place)
        s.percent[place] = 100.0 * static_cast<double>(s.counts[place]) / static_cast<double>(s.judgments);
    }
  }
  return table;
}

void write_ranking_table_csv(std::ostream& out, const RankingTable& table) {
  out << "criterion,strategy,best,medium,worst,judgments\n";
  for (const auto& [criterion, by_strategy] : table) {
    for (const auto& [strategy, s] : by_strategy) {
      out << criterion_key(criterion) << ',' << strategy_key(strategy);
      for (double p : s.percent) out << ',' << text::fixed(p, 1);
      out << ',' << s.judgments << '\n';
    }
  }
}

std::vector<PairJudgment> read_pairs_csv(std::istream& in) {
  const auto t = text::read_csv(in);
  const auto c_item = t.column("item_id"), c_judge = t.column("judge_id"), c_aspect = t.column("aspect"),
             c_verdict = t.column("verdict");
  std::vector<PairJudgment> out;
  std::set<std::tuple<std::string, std::string, Aspect>> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto line = t.lines[r];
    PairJudgment j;
    j.item_id = text::trim(row[c_item]);
    j.judge_id = text::trim(row[c_judge]);
    j.aspect = parse_cell<Aspect>(parse_aspect, row[c_aspect], line);
    j.verdict = parse_cell<Verdict>(parse_verdict, row[c_verdict], line);
    if (!seen.emplace(j.item_id, j.judge_id, j.aspect).second)
      throw ConflictError("line " + std::to_string(line) + ": repeated verdict for " + j.item_id + "/" + j.judge_id +
                          "/" + std::string(aspect_key(j.aspect)));
    out.push_back(std::move(j));
  }
  return out;
}

PairTable tabulate_pairs(std::span<const PairJudgment> judgments) {
  if (judgments.empty()) throw InputError("tabulate_pairs: no judgments");
  PairTable table;
  for (const auto& j : judgments) {
    auto& s = table.aspects[j.aspect];
    ++s.judgments;
    ++s.counts[static_cast<std::size_t>(j.verdict)];
  }
  for (auto aspect : kAllAspects) {
    auto it = table.aspects.find(aspect);
    if (it == table.aspects.end()) {
      table.warnings.push_back("aspect " + std::string(aspect_key(aspect)) + " has no judgments; omitted");
      continue;
    }
    auto& s = it->second;
    for (std::size_t v = 0; v < 3; ++v)
      s.percent[v] = 100.0 * static_cast<double>(s.counts[v]) / static_cast<double>(s.judgments);
  }
  return table;
}

void write_pair_table_csv(std::ostream& out, const PairTable& table) {
  out << "aspect,outline_only,tie,arc_enhanced,judgments\n";
  for (const auto& [aspect, s] : table.aspects) {
    out << aspect_key(aspect);
    for (double p : s.percent) out << ',' << text::fixed(p, 1);
    out << ',' << s.judgments << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Rejection sampling keeps the draw unbiased and identical across standard libraries.
  const auto below = [&rng](std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = rng();
      if (r >= threshold) return r % bound;
    }
  };
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[below(i)]);
  return order;
}

BundleSummary export_bundle(std::span<const GeneratedStory> stories, const std::filesystem::path& dir,
                            std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "stories");
  const auto order = shuffled_order(stories.size(), seed);

  json key = json::array();
  json files = json::array();
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const auto& s = stories[order[slot]];
    char name[32];
    std::snprintf(name, sizeof name, "story_%03zu.txt", slot + 1);
    const fs::path rel = fs::path("stories") / name;
    std::ofstream f(dir / rel, std::ios::binary);
    if (!f) throw InputError("cannot write " + (dir / rel).string());
    f << s.story.title << "\n\n";
    for (const auto& sent : s.story.sentences) f << sent.text << '\n';

    json k = {{"file", rel.generic_string()}, {"spec_id", s.spec.id}, {"strategy", std::string(strategy_key(s.spec.strategy))}};
    if (s.spec.requested_arc) k["requested_arc"] = std::string(discourse::arc_key(*s.spec.requested_arc));
    key.push_back(std::move(k));
    files.push_back({{"file", rel.generic_string()}, {"title", s.story.title}, {"genre", s.story.genre}});
  }

  const std::string key_text = key.dump(2) + "\n";
  BundleSummary summary;
  summary.key_file = dir / "key.json";
  summary.manifest = dir / "manifest.json";
  summary.stories = stories.size();
  {
    std::ofstream f(summary.key_file, std::ios::binary);
    f << key_text;
  }
  json manifest = {{"seed", seed}, {"stories", files}, {"key_file", "key.json"}, {"key_sha256", text::sha256_hex(key_text)}};
  std::ofstream f(summary.manifest, std::ios::binary);
  f << manifest.dump(2) << '\n';
  return summary;
}

}  // namespace narrative::gen
