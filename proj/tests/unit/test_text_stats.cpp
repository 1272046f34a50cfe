#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "narrative/error.hpp"
#include "narrative/stats.hpp"
#include "narrative/text.hpp"

using namespace narrative;

TEST(Text, TrimLowerCollapse) {
  EXPECT_EQ(text::trim("  a b \t\n"), "a b");
  EXPECT_EQ(text::to_lower("MiXeD"), "mixed");
  EXPECT_EQ(text::collapse_whitespace(" one\n two\t\tthree  "), "one two three");
}

TEST(Text, SplitJoinRoundTrip) {
  const auto parts = text::split("a,,b,c", ',');
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(text::join(parts, ","), "a,,b,c");
}

TEST(Text, FixedNeverPrintsNegativeZero) {
  EXPECT_EQ(text::fixed(-0.0, 1), "0.0");
  EXPECT_EQ(text::fixed(-0.04, 1), "0.0");
  EXPECT_EQ(text::fixed(82.0224719, 1), "82.0");
  EXPECT_EQ(text::fixed(2.0 / 3.0, 3), "0.667");
}

TEST(Text, Sha256KnownVector) {
  EXPECT_EQ(text::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, CsvQuotedFieldsAndLines) {
  std::istringstream in("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",2\n");
  const auto t = text::read_csv(in);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_EQ(t.rows[0][1], "he said \"hi\"");
  EXPECT_EQ(t.rows[1][0], "multi\nline");
  EXPECT_EQ(t.lines[0], 2u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_THROW(t.column("zzz"), ParseError);
}

TEST(Text, CsvWidthMismatchReportsLine) {
  std::istringstream in("a,b\n1,2\n3\n");
  try {
    text::read_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Text, CsvFieldQuotesWhenNeeded) {
  EXPECT_EQ(text::csv_field("plain"), "plain");
  EXPECT_EQ(text::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(text::csv_field("q\"q"), "\"q\"\"q\"");
}

TEST(Stats, MedianConventional) {
  const std::vector<double> two = {0.1, 0.3};
  EXPECT_NEAR(stats::median(two), 0.2, 1e-15);
  const std::vector<double> three = {5, 1, 3};
  EXPECT_EQ(stats::median(three), 3);
}

TEST(Stats, NearestRank) {
  const std::vector<double> v = {15, 20, 35, 40, 50};
  EXPECT_EQ(stats::nearest_rank(v, 0.05), 15);
  EXPECT_EQ(stats::nearest_rank(v, 0.30), 20);
  EXPECT_EQ(stats::nearest_rank(v, 0.40), 20);
  EXPECT_EQ(stats::nearest_rank(v, 0.50), 35);
  EXPECT_EQ(stats::nearest_rank(v, 1.00), 50);
  EXPECT_THROW(stats::nearest_rank(v, 0.0), DomainError);
  EXPECT_THROW(stats::nearest_rank(std::vector<double>{}, 0.5), InputError);
}

TEST(Stats, AverageRanksWithTies) {
  const std::vector<double> v = {1, 2, 2, 4};
  const auto r = stats::average_ranks(v);
  EXPECT_EQ(r, (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(Stats, PearsonZeroVarianceUndefined) {
  const std::vector<double> a = {1, 1, 1}, b = {1, 2, 3};
  EXPECT_THROW(stats::pearson(a, b), UndefinedError);
}

// Property: quartiles are ordered and bounded by min/max for random samples.
TEST(Stats, QuartilesOrderedProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto& x : v) x = u(rng);
    const auto q = stats::quartiles(v);
    EXPECT_LE(q.min, q.q1);
    EXPECT_LE(q.q1, q.median);
    EXPECT_LE(q.median, q.q3);
    EXPECT_LE(q.q3, q.max);
  }
}
