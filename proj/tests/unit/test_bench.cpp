#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "narrative/bench.hpp"
#include "support/oracles.hpp"
#include "support/support.hpp"

using namespace narrative;
namespace nt = narrative::testing;
using namespace narrative::bench;
using discourse::ArcType;

namespace {

double k(const std::string& a, const std::string& b) {
  std::vector<char> va(a.begin(), a.end()), vb(b.begin(), b.end());
  return cohen_kappa<char>(va, vb);
}

AnnotationRecord rec(std::string nid, std::string ann, ArcType arc, std::array<int, 5> tps) {
  return {std::move(nid), std::move(ann), arc, TurningPointSet(tps)};
}

GoldStandard simple_gold(const std::string& id, ArcType arc, std::array<int, 5> tps) {
  const std::vector<AnnotationRecord> r = {rec(id, "a", arc, tps)};
  return resolve_gold(r);
}

Prediction pred(const std::string& id, std::optional<ArcType> arc, std::optional<std::array<int, 5>> tps) {
  Prediction p{id, arc, std::nullopt, false, ""};
  if (tps) p.tps = TurningPointSet(*tps);
  p.abstained = !arc && !tps;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Kappa, HandContingencyTables) {
  EXPECT_NEAR(k("AABB", "ABAB"), 0.0, 1e-9);
  EXPECT_NEAR(k("AAAB", "AABB"), 0.5, 1e-9);
  EXPECT_NEAR(k("ABCABC", "ABCBCA"), 0.25, 1e-9);
  EXPECT_NEAR(k("AABBC", "BBAAC"), -0.25, 1e-9);
  EXPECT_NEAR(k("ABAB", "ABAB"), 1.0, 1e-9);
  EXPECT_EQ(k("AAAA", "AAAA"), 1.0);
}

TEST(Kappa, MatchesContingencyOracle) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"AABBCCDA", "ABBCCDDA"}, {"ABCDEFG", "GFEDCBA"}, {"AAAAABBBBB", "AAABBBBBAA"},
      {"ABABABAB", "AABBAABB"}, {"CCCABD", "CCABDD"}, {"XYXYXYZZ", "XYYYXZZX"}};
  for (const auto& [a, b] : cases) {
    std::vector<char> va(a.begin(), a.end()), vb(b.begin(), b.end());
    EXPECT_NEAR(cohen_kappa<char>(va, vb), nt::kappa_oracle(va, vb), 1e-9) << a << " / " << b;
    EXPECT_NEAR(cohen_kappa<char>(va, vb), cohen_kappa<char>(vb, va), 1e-12);
  }
}

TEST(Kappa, ErrorsAndArcAlphabet) {
  std::vector<char> a = {'A'}, b = {'A', 'B'}, e;
  EXPECT_THROW(cohen_kappa<char>(a, b), InputError);
  EXPECT_THROW(cohen_kappa<char>(e, e), InputError);
  const std::vector<ArcType> x = {ArcType::Icarus, ArcType::Oedipus, ArcType::Icarus};
  EXPECT_NEAR(cohen_kappa<ArcType>(x, x), 1.0, 1e-12);
}

TEST(Kappa, IndependentRatersMonteCarlo) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> d(0, 6);
  std::vector<int> a(10'000), b(10'000);
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);
  EXPECT_NEAR(cohen_kappa<int>(a, b), 0.0, 0.05);
}

TEST(Spearman, HandRankedCases) {
  const std::vector<double> a = {1, 2, 2, 4}, b = {2, 1, 3, 4};
  EXPECT_NEAR(spearman(a, b), 3.0 / std::sqrt(22.5), 1e-9);
  const std::vector<double> up = {1, 5, 7, 9, 12}, down = {12, 9, 7, 5, 1};
  EXPECT_NEAR(spearman(up, up), 1.0, 1e-12);
  EXPECT_NEAR(spearman(up, down), -1.0, 1e-12);
}

TEST(Spearman, MatchesBruteForceOracle) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{1, 2, 2, 4}, {2, 1, 3, 4}},
      {{10, 20, 30, 40, 50}, {5, 6, 7, 8, 7}},
      {{3, 1, 4, 1, 5, 9, 2, 6}, {2, 7, 1, 8, 2, 8, 1, 8}},
      {{0.1, 0.4, 0.4, 0.4, 0.9}, {1, 2, 3, 4, 5}},
      {{7, 3}, {1, 2}},
      {{5, 5, 1, 2, 3, 3}, {6, 5, 4, 3, 2, 1}}};
  for (const auto& [a, b] : cases) EXPECT_NEAR(spearman(a, b), nt::spearman_oracle(a, b), 1e-9);
}

TEST(Spearman, Errors) {
  const std::vector<double> one = {1}, flat = {2, 2, 2}, ok = {1, 2, 3};
  EXPECT_THROW(spearman(one, one), InputError);
  EXPECT_THROW(spearman(flat, ok), UndefinedError);
  EXPECT_THROW(spearman(ok, std::vector<double>{1, 2}), InputError);
}

TEST(Shares, TwentyThreeLabelsLargestRemainder) {
  std::vector<ArcType> labels;
  const std::array<int, 7> counts = {12, 5, 3, 2, 1, 0, 0};
  for (std::size_t i = 0; i < 7; ++i) labels.insert(labels.end(), counts[i], discourse::kAllArcs[i]);
  const auto s = distribution_shares(labels);
  EXPECT_EQ(s.total, 23u);
  const std::array<double, 7> expected = {52.2, 21.7, 13.0, 8.7, 4.4, 0.0, 0.0};
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(s.rounded[i], expected[i], 1e-9) << i;
    EXPECT_NEAR(s.percent[i], 100.0 * counts[i] / 23.0, 1e-12);
  }
}

TEST(Shares, UniformAndSingleLabel) {
  std::vector<ArcType> uniform(discourse::kAllArcs.begin(), discourse::kAllArcs.end());
  const auto u = distribution_shares(uniform);
  for (double r : u.rounded) EXPECT_NEAR(r, 14.3, 0.1 + 1e-9);
  std::vector<ArcType> one(5, ArcType::ManInHole);
  const auto o = distribution_shares(one);
  EXPECT_DOUBLE_EQ(o.rounded[static_cast<std::size_t>(ArcType::ManInHole)], 100.0);
  EXPECT_THROW(distribution_shares(std::vector<ArcType>{}), InputError);
}

// Property: rounded shares always total exactly 100.0 in tenths.
TEST(Shares, AlwaysSumToHundredProperty) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> arc(0, 6), len(1, 60);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ArcType> labels(len(rng));
    for (auto& l : labels) l = discourse::kAllArcs[arc(rng)];
    const auto s = distribution_shares(labels);
    long tenths = 0;
    for (double r : s.rounded) tenths += std::lround(r * 10);
    EXPECT_EQ(tenths, 1000);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_LE(std::abs(s.rounded[i] - s.percent[i]), 0.1 + 1e-9);
  }
}

TEST(Positions, EightNarrativeQuartiles) {
  const std::array<int, 8> ns = {10, 20, 10, 16, 8, 25, 12, 40};
  const std::array<int, 8> tp1 = {1, 3, 2, 2, 1, 5, 3, 6};
  const std::array<int, 8> tp5 = {9, 19, 10, 14, 7, 20, 11, 34};
  std::vector<corpus::Narrative> narratives;
  std::map<std::string, TurningPointSet> positions;
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<std::string> s;
    for (int j = 1; j <= ns[i]; ++j) s.push_back("Line " + std::to_string(j) + ".");
    const std::string id = "q" + std::to_string(i);
    narratives.push_back(corpus::make_narrative(id, "t", "g", "human", s));
    positions[id] = TurningPointSet({tp1[i], tp1[i] + 1, tp1[i] + 2, tp5[i] - 1, tp5[i]});
  }
  const corpus::CorpusStore store(narratives);
  const auto summary = tp_position_summary(positions, store);
  const auto& q1 = *summary.quartiles[0];
  EXPECT_NEAR(q1.q1, 0.125, 1e-12);
  EXPECT_NEAR(q1.median, 0.15, 1e-12);
  EXPECT_NEAR(q1.q3, 0.2, 1e-12);
  const auto& q5 = *summary.quartiles[4];
  EXPECT_NEAR(q5.q1, 0.85, 1e-12);
  EXPECT_NEAR(q5.median, 0.8875, 1e-12);
  EXPECT_NEAR(q5.q3, 11.0 / 12.0, 1e-12);
  EXPECT_EQ(summary.relative[4].size(), 8u);
}

TEST(Positions, SingleNarrativeEndpoint) {
  const corpus::CorpusStore store({corpus::make_narrative("z", "t", "g", "human",
                                                         {"a.", "b.", "c.", "d.", "e.", "f.", "g.", "h.", "i.", "j."})});
  const auto s = tp_position_summary({{"z", TurningPointSet({1, 2, 3, 4, 10})}}, store);
  EXPECT_EQ(s.relative[4], std::vector<double>{1.0});
}

// ---------------------------------------------------------------------------

TEST(Gold, MajorityAndMedian) {
  const std::vector<AnnotationRecord> r = {rec("n", "a", ArcType::ManInHole, {1, 2, 3, 17, 30}),
                                           rec("n", "b", ArcType::ManInHole, {1, 2, 3, 19, 30}),
                                           rec("n", "c", ArcType::Icarus, {1, 2, 3, 25, 30})};
  const auto g = resolve_gold(r);
  EXPECT_EQ(g.arc, ArcType::ManInHole);
  EXPECT_EQ(g.tps[discourse::TurningPoint::MajorSetback], 19);
  EXPECT_EQ(g.accepted_arcs, std::set<ArcType>{ArcType::ManInHole});
}

TEST(Gold, NoMajorityIsAmbiguous) {
  const std::vector<AnnotationRecord> r = {rec("n", "a", ArcType::Icarus, {1, 2, 3, 4, 5}),
                                           rec("n", "b", ArcType::Oedipus, {1, 2, 3, 4, 5}),
                                           rec("n", "c", ArcType::Cinderella, {1, 2, 3, 4, 5})};
  const auto g = resolve_gold(r);
  EXPECT_TRUE(g.ambiguous());
  EXPECT_TRUE(g.accepted_arcs.empty());
}

TEST(Gold, EvenCountLowerMedianAndAlternatives) {
  const std::vector<AnnotationRecord> r = {rec("n", "a", ArcType::Icarus, {2, 4, 6, 8, 10}),
                                           rec("n", "b", ArcType::Oedipus, {3, 5, 7, 9, 12})};
  EXPECT_EQ(resolve_gold(r).tps.positions(), (std::array<int, 5>{2, 4, 6, 8, 10}));
  EXPECT_TRUE(resolve_gold(r).ambiguous());
  const auto first = resolve_gold(r, GoldResolution::FirstAnnotator);
  EXPECT_EQ(first.arc, ArcType::Icarus);
  const auto any = resolve_gold(r, GoldResolution::AnyAnnotator);
  EXPECT_EQ(any.accepted_arcs, (std::set<ArcType>{ArcType::Icarus, ArcType::Oedipus}));
  EXPECT_EQ(any.accepted_tps[4], (std::set<int>{10, 12}));
}

TEST(Annotations, CsvParsingAndErrors) {
  std::istringstream ok("narrative_id,annotator_id,arc,tp1,tp2,tp3,tp4,tp5\nn1,a,Man in Hole,1,2,3,4,5\nn1,b,Icarus,1,2,3,4,6\n");
  const auto r = read_annotations_csv(ok);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].arc, ArcType::Icarus);
  std::istringstream dup("narrative_id,annotator_id,arc,tp1,tp2,tp3,tp4,tp5\nn1,a,Icarus,1,2,3,4,5\nn1,a,Icarus,1,2,3,4,5\n");
  EXPECT_THROW(read_annotations_csv(dup), ConflictError);
  std::istringstream bad("narrative_id,annotator_id,arc,tp1,tp2,tp3,tp4,tp5\nn1,a,Heroic,1,2,3,4,5\n");
  try {
    read_annotations_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Annotations, ValidateAgainstCorpus) {
  const auto store = corpus::load_corpus(nt::fixture("corpus10.jsonl").string());
  const auto records = load_annotations(nt::fixture("gold10.csv").string());
  EXPECT_NO_THROW(validate_annotations(records, store));
  std::vector<AnnotationRecord> unknown = {rec("nope", "a", ArcType::Icarus, {1, 2, 3, 4, 5})};
  EXPECT_THROW(validate_annotations(unknown, store), InputError);
  std::vector<AnnotationRecord> range = {rec("n01", "a", ArcType::Icarus, {1, 2, 3, 4, 500})};
  EXPECT_THROW(validate_annotations(range, store), DomainError);
}

// ---------------------------------------------------------------------------

TEST(Score, TenItemsFortyPercentAndAverage) {
  GoldMap gold;
  std::vector<Prediction> preds;
  const std::array<int, 5> g = {1, 2, 3, 4, 5};
  // TP k (0-based) correct on the first 4 - k items.
  for (int i = 0; i < 10; ++i) {
    const std::string id = "i" + std::to_string(i);
    gold[id] = simple_gold(id, ArcType::Icarus, g);
    std::array<int, 5> p = {20, 20, 20, 20, 20};
    for (int t = 0; t < 5; ++t)
      if (i < 4 - t) p[t] = g[t];
    preds.push_back(pred(id, std::nullopt, p));
  }
  const auto r = score(preds, gold, MatchMode::Exact, ScoreTargets{false, true});
  EXPECT_NEAR(r.tp_accuracy[0], 40.0, 1e-12);
  EXPECT_NEAR(r.tp_accuracy[4], 0.0, 1e-12);
  EXPECT_NEAR(r.tp_average, 20.0, 1e-12);
}

TEST(Score, FuzzyArcAndAbstentions) {
  GoldMap gold;
  gold["a"] = simple_gold("a", ArcType::RagsToRiches, {1, 2, 3, 4, 5});
  gold["b"] = simple_gold("b", ArcType::Icarus, {1, 2, 3, 4, 5});
  std::vector<Prediction> preds = {pred("a", ArcType::Cinderella, std::nullopt), pred("b", std::nullopt, std::nullopt)};
  const ScoreTargets arc_only{true, false};
  EXPECT_NEAR(score(preds, gold, MatchMode::Fuzzy, arc_only).arc_accuracy, 50.0, 1e-12);
  const auto exact = score(preds, gold, MatchMode::Exact, arc_only);
  EXPECT_NEAR(exact.arc_accuracy, 0.0, 1e-12);
  EXPECT_EQ(exact.abstentions, 1u);
}

TEST(Score, IdMismatchListsDifference) {
  GoldMap gold;
  gold["a"] = simple_gold("a", ArcType::Icarus, {1, 2, 3, 4, 5});
  gold["b"] = simple_gold("b", ArcType::Icarus, {1, 2, 3, 4, 5});
  std::vector<Prediction> preds = {pred("a", ArcType::Icarus, std::nullopt), pred("c", ArcType::Icarus, std::nullopt)};
  EXPECT_EQ(id_difference(preds, gold).size(), 2u);
  EXPECT_THROW(score(preds, gold, MatchMode::Exact), InputError);
}

TEST(Score, AmbiguousGoldLeavesArcDenominator) {
  const std::vector<AnnotationRecord> r = {rec("amb", "a", ArcType::Icarus, {1, 2, 3, 4, 5}),
                                           rec("amb", "b", ArcType::Oedipus, {1, 2, 3, 4, 5})};
  GoldMap gold = resolve_all(r);
  gold["ok"] = simple_gold("ok", ArcType::Icarus, {1, 2, 3, 4, 5});
  std::vector<Prediction> preds = {pred("amb", ArcType::Icarus, std::nullopt), pred("ok", ArcType::Icarus, std::nullopt)};
  const auto rep = score(preds, gold, MatchMode::Exact, ScoreTargets{true, false});
  EXPECT_EQ(rep.arc_items, 1u);
  EXPECT_NEAR(rep.arc_accuracy, 100.0, 1e-12);
}

// Properties: fuzzy never scores below exact; fixing a wrong item never lowers accuracy.
TEST(Score, ExactNeverExceedsFuzzyAndMonotone) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pos(1, 30), arc(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    GoldMap gold;
    std::vector<Prediction> preds;
    for (int i = 0; i < 12; ++i) {
      const std::string id = "p" + std::to_string(i);
      std::array<int, 5> g, p;
      for (int t = 0; t < 5; ++t) g[t] = pos(rng), p[t] = pos(rng);
      gold[id] = simple_gold(id, discourse::kAllArcs[arc(rng)], g);
      preds.push_back(pred(id, discourse::kAllArcs[arc(rng)], p));
    }
    const auto ex = score(preds, gold, MatchMode::Exact);
    const auto fz = score(preds, gold, MatchMode::Fuzzy);
    EXPECT_LE(ex.arc_accuracy, fz.arc_accuracy);
    for (int t = 0; t < 5; ++t) EXPECT_LE(ex.tp_accuracy[t], fz.tp_accuracy[t]);

    auto fixed = preds;
    fixed[0].arc = gold[fixed[0].narrative_id].arc;
    fixed[0].tps = gold[fixed[0].narrative_id].tps;
    const auto better = score(fixed, gold, MatchMode::Exact);
    EXPECT_GE(better.arc_accuracy, ex.arc_accuracy);
    EXPECT_GE(better.tp_average, ex.tp_average);
  }
}

TEST(Score, CsvLayoutBlanksAbsentTargets) {
  ScoreReport r;
  r.targets = {true, false};
  r.items = 3;
  r.arc_accuracy = 200.0 / 3;
  r.arc_items = 3;
  std::ostringstream out;
  write_score_csv(out, {{"m/plain", r}});
  EXPECT_EQ(out.str(), "label,mode,TP1,TP2,TP3,TP4,TP5,Avg.,Arc,items,abstentions\nm/plain,exact,,,,,,,66.7,3,0\n");
}

TEST(Predictions, JsonlRoundTrip) {
  std::vector<Prediction> p = {pred("a", ArcType::Oedipus, std::array<int, 5>{1, 2, 3, 4, 5}),
                               pred("b", std::nullopt, std::nullopt)};
  std::stringstream ss;
  write_predictions_jsonl(ss, p);
  const auto back = read_predictions_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].arc, ArcType::Oedipus);
  EXPECT_EQ(back[0].tps, p[0].tps);
  EXPECT_TRUE(back[1].abstained);
}

// ---------------------------------------------------------------------------

class Tasks : public ::testing::Test {
 protected:
  void SetUp() override {
    store = corpus::load_corpus(nt::fixture("corpus10.jsonl").string());
    gold = resolve_all(load_annotations(nt::fixture("gold10.csv").string()));
  }
  std::shared_ptr<llm::ChatClient> replay(int offset) {
    auto mock = std::make_shared<llm::MockProvider>(nt::gold_transcript(store, gold, offset));
    return nt::client_for(mock);
  }
  corpus::CorpusStore store;
  GoldMap gold;
};

TEST_F(Tasks, GoldReplayScoresPerfect) {
  auto client = replay(0);
  for (auto v : {ArcVariant::Plain, ArcVariant::WithTpDescriptions}) {
    const auto run = run_arc_task(store, gold, *client, v);
    EXPECT_EQ(run.predictions.size(), 10u);
    EXPECT_NEAR(score(run.predictions, gold, MatchMode::Exact).arc_accuracy, 100.0, 1e-12);
  }
  for (auto v : {TpVariant::Plain, TpVariant::WithArcPrior}) {
    const auto run = run_tp_task(store, gold, *client, v);
    const auto r = score(run.predictions, gold, MatchMode::Exact);
    for (double a : r.tp_accuracy) EXPECT_NEAR(a, 100.0, 1e-12);
  }
}

TEST_F(Tasks, OffsetReplayExactZeroFuzzyFull) {
  auto client = replay(3);
  const auto run = run_tp_task(store, gold, *client, TpVariant::Plain);
  const auto ex = score(run.predictions, gold, MatchMode::Exact);
  const auto fz = score(run.predictions, gold, MatchMode::Fuzzy);
  for (int t = 0; t < 5; ++t) {
    EXPECT_NEAR(ex.tp_accuracy[t], 0.0, 1e-12);
    EXPECT_NEAR(fz.tp_accuracy[t], 100.0, 1e-12);
  }
}

TEST_F(Tasks, MissingReplyBecomesAbstention) {
  auto client = nt::client_for(std::make_shared<llm::MockProvider>());
  const auto run = run_arc_task(store, gold, *client, ArcVariant::Plain, {2, 0});
  EXPECT_EQ(run.predictions.size(), 10u);
  for (const auto& p : run.predictions) {
    EXPECT_TRUE(p.abstained);
    EXPECT_FALSE(p.error.empty());
  }
  EXPECT_NEAR(score(run.predictions, gold, MatchMode::Exact).arc_accuracy, 0.0, 1e-12);
}

TEST_F(Tasks, ArcPriorSkipsAmbiguousGold) {
  gold.begin()->second.arc.reset();
  gold.begin()->second.accepted_arcs.clear();
  auto client = replay(0);
  const auto run = run_tp_task(store, gold, *client, TpVariant::WithArcPrior);
  ASSERT_EQ(run.skipped.size(), 1u);
  EXPECT_EQ(run.skipped[0].narrative_id, gold.begin()->first);
  EXPECT_EQ(run.predictions.size(), 9u);
}

TEST_F(Tasks, WorkerCountDoesNotChangeOutput) {
  auto a = run_tp_task(store, gold, *replay(0), TpVariant::Plain, {1, 1});
  auto b = run_tp_task(store, gold, *replay(0), TpVariant::Plain, {4, 1});
  std::ostringstream sa, sb;
  write_predictions_jsonl(sa, a.predictions);
  write_predictions_jsonl(sb, b.predictions);
  EXPECT_EQ(sa.str(), sb.str());
}

// ---------------------------------------------------------------------------

TEST(Agreement, IdenticalAnnotatorsAgreePerfectly) {
  std::vector<AnnotationRecord> r;
  const std::array<ArcType, 3> arcs = {ArcType::Icarus, ArcType::Oedipus, ArcType::ManInHole};
  for (int i = 0; i < 3; ++i) {
    const std::string id = "n" + std::to_string(i);
    const std::array<int, 5> t = {1 + i, 3 + i, 5 + i, 7 + i, 9 + i};
    r.push_back(rec(id, "a", arcs[i], t));
    r.push_back(rec(id, "b", arcs[i], t));
  }
  const auto rep = inter_annotator_agreement(r);
  EXPECT_NEAR(rep.arc_kappa, 1.0, 1e-12);
  EXPECT_NEAR(rep.tp_spearman, 1.0, 1e-12);
  EXPECT_EQ(rep.narratives, 3u);
  EXPECT_EQ(rep.rater_pairs, 1u);
  const auto base = human_baseline(r, MatchMode::Exact);
  EXPECT_NEAR(base.arc_accuracy, 100.0, 1e-12);
  EXPECT_NEAR(base.tp_average, 100.0, 1e-12);
}

TEST(Agreement, SingleAnnotatorIsInsufficient) {
  std::vector<AnnotationRecord> r = {rec("n", "a", ArcType::Icarus, {1, 2, 3, 4, 5})};
  EXPECT_THROW(inter_annotator_agreement(r), InsufficientDataError);
}

TEST(Agreement, FixtureAnnotationsInRange) {
  const auto rep = inter_annotator_agreement(load_annotations(nt::fixture("gold10.csv").string()));
  EXPECT_EQ(rep.narratives, 10u);
  EXPECT_GE(rep.arc_kappa, -1.0);
  EXPECT_LE(rep.arc_kappa, 1.0);
  EXPECT_GT(rep.tp_spearman, 0.5);
}
