#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "narrative/report/chart.hpp"
#include "narrative/report/cli.hpp"
#include "narrative/report/run.hpp"
#include "support/support.hpp"

using namespace narrative;
namespace nt = narrative::testing;
using namespace narrative::report;
namespace fs = std::filesystem;

namespace {

std::vector<double> attr_values(const std::string& svg, const std::string& cls, const std::string& attr) {
  const std::regex re("class=\"" + cls + "\"[^>]*" + attr + "=\"([-0-9.]+)\"");
  std::vector<double> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back(std::stod((*it)[1]));
  return out;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return nt::fixture(name).string(); }

}  // namespace

TEST(Charts, PieAnglesProportional) {
  ChartSpec spec{ChartKind::Pie, "p", "", "", {{"w", {}, {50, 30, 20}}}, {"a", "b", "c"}, {}};
  const auto w = pie_wedges(spec);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[0].sweep_deg, 180.0, 1e-12);
  EXPECT_NEAR(w[1].sweep_deg, 108.0, 1e-12);
  EXPECT_NEAR(w[2].sweep_deg, 72.0, 1e-12);
  EXPECT_NEAR(w[1].start_deg, 180.0, 1e-12);
  const auto svg = render_svg(spec);
  EXPECT_EQ(attr_values(svg, "wedge", "data-sweep"), (std::vector<double>{180, 108, 72}));
}

TEST(Charts, PieRejectsNegativeWeights) {
  ChartSpec spec{ChartKind::Pie, "p", "", "", {{"w", {}, {1, -1}}}, {"a", "b"}, {}};
  EXPECT_THROW(spec.validate(), InputError);
}

TEST(Charts, ConstantLineIsHorizontal) {
  ChartSpec spec{ChartKind::Line, "l", "x", "y", {{"c", {0, 0.5, 1}, {0.4, 0.4, 0.4}}}, {}, {}};
  const auto svg = render_svg(spec);
  const std::regex pts_re("class=\"series\"[^>]*points=\"([^\"]+)\"");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, pts_re));
  std::istringstream pts(m[1].str());
  std::set<std::string> ys;
  std::string pair;
  while (pts >> pair) ys.insert(pair.substr(pair.find(',') + 1));
  EXPECT_EQ(ys.size(), 1u);
}

TEST(Charts, ViolinMarksMatchQuartiles) {
  const std::vector<double> sample = {0.1, 0.125, 0.125, 0.15, 0.15, 0.2, 0.2, 0.25};
  ChartSpec spec{ChartKind::Violin, "v", "", "", {{"TP1", {}, sample}}, {}, {}};
  const auto q = stats::quartiles(sample);
  const auto svg = render_svg(spec);
  EXPECT_NEAR(attr_values(svg, "iqr", "data-q1").at(0), q.q1, 1e-6);
  EXPECT_NEAR(attr_values(svg, "iqr", "data-q3").at(0), q.q3, 1e-6);
  EXPECT_NEAR(attr_values(svg, "median", "data-value").at(0), q.median, 1e-6);
  EXPECT_NEAR(violin_bands(spec).at(0).quartiles.median, 0.15, 1e-12);
}

TEST(Charts, RenderWritesSvgAndCsvDeterministically) {
  nt::TempDir dir("chart");
  ChartSpec spec{ChartKind::Bar, "b", "", "", {{"s", {}, {1, 2}}}, {"x", "y"}, dir / "c.svg"};
  const auto first = render_chart(spec);
  EXPECT_EQ(render_svg(spec), first);
  EXPECT_EQ(nt::slurp(dir / "c.csv"), "series,category,value\ns,x,1.000000\ns,y,2.000000\n");
  EXPECT_EQ(attr_values(first, "bar", "data-value"), (std::vector<double>{1, 2}));
}

TEST(Charts, MismatchedSeriesRejected) {
  ChartSpec spec{ChartKind::Line, "l", "", "", {{"c", {0, 1}, {0.4}}}, {}, {}};
  EXPECT_THROW(spec.validate(), InputError);
}

TEST(Run, ManifestSortedWithVersion) {
  nt::TempDir dir("manifest");
  RunManifest m{"score", "abc", "", {{"gold", "h"}}, {"b.csv", "a.csv", "b.csv"}, {}};
  write_manifest(dir.path(), m);
  const auto j = llm::json::parse(nt::slurp(dir / "manifest.json"));
  EXPECT_EQ(j["outputs"], (llm::json{"a.csv", "b.csv"}));
  EXPECT_EQ(j["version"], std::string(toolkit_version()));
  EXPECT_TRUE(j["corpus_hash"].is_null());
}

// ---------------------------------------------------------------------------

TEST(Cli, UsageAndUnknownCommand) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"score"}).code, kExitUsage);
}

TEST(Cli, IngestWritesCorpusAndManifest) {
  nt::TempDir dir("ingest");
  const auto r = cli({"ingest", "--corpus", fixture("corpus10.jsonl"), "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(corpus::load_corpus((dir / "corpus.jsonl").string()).size(), 10u);
  const auto m = llm::json::parse(nt::slurp(dir / "manifest.json"));
  EXPECT_EQ(m["command"], "ingest");
  EXPECT_FALSE(m["corpus_hash"].is_null());
}

TEST(Cli, BenchWithGoldReplayThenScoreAndReport) {
  nt::TempDir dir("bench");
  const auto store = corpus::load_corpus(fixture("corpus10.jsonl"));
  const auto gold = bench::resolve_all(bench::load_annotations(fixture("gold10.csv")));
  llm::write_transcript(dir / "t.json", nt::gold_transcript(store, gold, 0));
  const auto run = dir / "run";
  auto r = cli({"bench-tp", "--corpus", fixture("corpus10.jsonl"), "--gold", fixture("gold10.csv"), "--transcript",
                (dir / "t.json").string(), "--out", run.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto scores = nt::slurp(run / "scores.csv");
  EXPECT_NE(scores.find("mock/plain,exact,100.0,100.0,100.0,100.0,100.0,100.0,,10,0"), std::string::npos) << scores;
  EXPECT_TRUE(fs::exists(run / "charts" / "scores.svg"));
  EXPECT_TRUE(fs::exists(run / "charts" / "tp_positions.svg"));

  r = cli({"score", "--predictions", (run / "predictions.jsonl").string(), "--gold", fixture("gold10.csv"),
           "--mode", "fuzzy"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find(",fuzzy,100.0"), std::string::npos) << r.out;

  fs::remove_all(run / "charts");
  r = cli({"report", "--run", run.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(run / "charts" / "scores.svg"));
}

TEST(Cli, ScoreIdMismatchPrintsDifference) {
  nt::TempDir dir("mismatch");
  std::ofstream(dir / "p.jsonl") << "{\"narrative_id\":\"n01\",\"abstained\":false,\"arc\":\"Icarus\"}\n"
                                 << "{\"narrative_id\":\"zz\",\"abstained\":false,\"arc\":\"Icarus\"}\n";
  const auto r = cli({"score", "--predictions", (dir / "p.jsonl").string(), "--gold", fixture("gold10.csv")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("zz"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("n02"), std::string::npos) << r.err;
}

TEST(Cli, MissingTranscriptAnswersAbstainButSucceed) {
  nt::TempDir dir("abstain");
  llm::write_transcript(dir / "empty.json", {});
  const auto r = cli({"bench-arc", "--corpus", fixture("corpus10.jsonl"), "--gold", fixture("gold10.csv"),
                      "--transcript", (dir / "empty.json").string(), "--mode", "exact", "--out", (dir / "run").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(nt::slurp(dir / "run" / "scores.csv").find(",0.0,10,10"), std::string::npos);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, JudgeIngestTables) {
  nt::TempDir dir("judge");
  const auto r = cli({"judge-ingest", "--rankings", fixture("rankings89.csv"), "--pairs", fixture("pairs22.csv"),
                      "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(nt::slurp(dir / "ranking_table.csv").find("suspense,outline_only,7.9,10.1,82.0,89"), std::string::npos);
  EXPECT_NE(nt::slurp(dir / "pair_table.csv").find("overall,22.7,9.1,68.2,22"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "charts" / "rankings.svg"));
}

TEST(Cli, AgreementOutputs) {
  nt::TempDir dir("agree");
  const auto r = cli({"agreement", "--annotations", fixture("gold10.csv"), "--corpus", fixture("corpus10.jsonl"),
                      "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = llm::json::parse(nt::slurp(dir / "agreement.json"));
  EXPECT_TRUE(j.contains("arc_kappa"));
  EXPECT_TRUE(fs::exists(dir / "arc_shares.csv"));
  EXPECT_TRUE(fs::exists(dir / "charts" / "arc_shares.svg"));
}
