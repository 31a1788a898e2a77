#include <gtest/gtest.h>

#include <random>

#include "qcompiler/evalkit.hpp"

using namespace qcompiler;

namespace {

std::vector<std::string> golds(std::initializer_list<std::string> g) { return g; }

std::string random_text(std::mt19937_64& rng) {
  static const std::string alphabet = "ab AB.,!-the an";
  std::uniform_int_distribution<std::size_t> len(0, 12), pick(0, alphabet.size() - 1);
  std::string s;
  for (auto n = len(rng); n > 0; --n) s.push_back(alphabet[pick(rng)]);
  return s;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_answer("The Rome!"), "rome");
  EXPECT_EQ(normalize_answer("James Cameron"), "james cameron");
  EXPECT_EQ(normalize_answer(""), "");
  EXPECT_EQ(normalize_answer("  A  cat,  an  apple "), "cat apple");
}

TEST(SplitAliases, Semicolons) {
  EXPECT_EQ(split_aliases("for the conclave in Rome; Rome; Roma"),
            (std::vector<std::string>{"for the conclave in Rome", "Rome", "Roma"}));
}

TEST(ExactMatch, Examples) {
  EXPECT_EQ(exact_match("Rome", split_aliases("for the conclave in Rome; Rome; Roma")), 1);
  EXPECT_EQ(exact_match("Paris", golds({"Rome"})), 0);
  EXPECT_EQ(exact_match("the Rome", golds({"Rome"})), 1);
}

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy("Roncalli left for the conclave in Rome", golds({"Rome"})), 1);
  EXPECT_EQ(accuracy("no relation", golds({"Rome"})), 0);
  EXPECT_EQ(accuracy("Rome", golds({"Rome"})), 1);
  EXPECT_EQ(accuracy("anything", golds({"the"})), 0);
}

TEST(F1, Examples) {
  EXPECT_DOUBLE_EQ(f1_score("james cameron", golds({"james cameron"})), 1.0);
  // p = 2/4, r = 2/2, f1 = 2pr/(p+r) = 2/3.
  EXPECT_NEAR(f1_score("james cameron born 1954", golds({"james cameron"})), 2.0 / 3.0, 1e-4);
  EXPECT_DOUBLE_EQ(f1_score("x", golds({"y"})), 0.0);
  EXPECT_DOUBLE_EQ(f1_score("", golds({""})), 1.0);
  EXPECT_DOUBLE_EQ(f1_score("", golds({"y"})), 0.0);
}

TEST(F1, CountsRepeatedTokensOnce) {
  // common = min(2,1) = 1, p = 1/2, r = 1.
  EXPECT_NEAR(f1_score("rome rome", golds({"rome"})), 2.0 / 3.0, 1e-12);
}

TEST(Metrics, ExactMatchImpliesAccuracy) {
  std::mt19937_64 rng(7);
  int matches = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto pred = random_text(rng);
    const auto gold = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? pred : random_text(rng);
    const std::vector<std::string> g{gold};
    const int em = exact_match(pred, g);
    matches += em;
    if (em) ASSERT_EQ(accuracy(pred, g), 1) << '"' << pred << "\" vs \"" << gold << '"';
    const double f1 = f1_score(pred, g);
    ASSERT_GE(f1, 0.0);
    ASSERT_LE(f1, 1.0);
  }
  EXPECT_GT(matches, 1000);
}

TEST(Metrics, AliasOrderAndWhitespaceInvariance) {
  const std::vector<std::string> ab{"rome", "conclave in rome"};
  const std::vector<std::string> ba{"conclave in rome", "rome"};
  const std::string p = "he went to the conclave";
  EXPECT_DOUBLE_EQ(f1_score(p, ab), f1_score(p, ba));
  EXPECT_GE(f1_score(p, ab), f1_score(p, std::vector<std::string>{"rome"}));
  EXPECT_EQ(exact_match("  Rome \n", golds({"Rome"})), 1);
  EXPECT_DOUBLE_EQ(f1_score("  james cameron ", golds({" james cameron"})), 1.0);
}

TEST(CountTokens, Heuristic) {
  EXPECT_EQ(count_tokens("Who directed Titanic?"), 4);
  EXPECT_EQ(count_tokens(""), 0);
  EXPECT_EQ(count_tokens("1510-12, Venice."), 6);
}

TEST(CountTokens, ConcatenationBoundary) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_text(rng);
    const auto b = random_text(rng);
    const auto joined = count_tokens(a + " " + b);
    const auto parts = count_tokens(a) + count_tokens(b);
    ASSERT_EQ(joined, parts);
    ASSERT_LE(count_tokens(a + b), parts);
    ASSERT_GE(count_tokens(a + b) + 1, parts);
  }
}

TEST(TokenCounts, Arithmetic) {
  TokenCounts a{1, 2, 3};
  a += TokenCounts{10, 20, 30};
  EXPECT_EQ(a, (TokenCounts{11, 22, 33}));
  EXPECT_EQ(a.total(), 66);
}

TEST(Aggregate, Means) {
  const std::vector<MetricRow> one{{"q1", 1, 1, 1.0, 10}};
  EXPECT_DOUBLE_EQ(aggregate_run(one).em, 100.0);

  const std::vector<MetricRow> two{{"q1", 1, 1, 1.0, 10}, {"q2", 0, 1, 0.5, 21}};
  const auto r = aggregate_run(two);
  EXPECT_DOUBLE_EQ(r.em, 50.0);
  EXPECT_DOUBLE_EQ(r.acc, 100.0);
  EXPECT_DOUBLE_EQ(r.f1, 75.0);
  EXPECT_DOUBLE_EQ(r.tokens_per_query, 15.5);
}

TEST(Aggregate, RecomputedBatch) {
  const std::vector<MetricRow> rows{{"a", 1, 1, 1.0, 3}, {"b", 0, 1, 2.0 / 3.0, 4}, {"c", 0, 0, 0.0, 5}};
  const auto r = aggregate_run(rows);
  // em 1/3 -> 33.3; acc 2/3 -> 66.7; f1 (1 + 0.6667) / 3 -> 55.6.
  EXPECT_DOUBLE_EQ(r.em, 33.3);
  EXPECT_DOUBLE_EQ(r.acc, 66.7);
  EXPECT_DOUBLE_EQ(r.f1, 55.6);
  EXPECT_DOUBLE_EQ(r.tokens_per_query, 4.0);
  EXPECT_EQ(r.count, 3u);
}

TEST(Aggregate, FormatOneDecimal) {
  EXPECT_EQ(format_percent(44.5), "44.5");
  EXPECT_EQ(format_percent(100.0), "100.0");
  EXPECT_EQ(format_percent(33.3), "33.3");
  EXPECT_EQ(format_percent(0.0), "0.0");
}

TEST(Aggregate, Empty) { EXPECT_EQ(aggregate_run({}).count, 0u); }

TEST(Score, Row) {
  const auto row = score_prediction("id", "for the conclave in Rome", split_aliases("for the conclave in Rome; Rome"), 7);
  EXPECT_EQ(row.em, 1);
  EXPECT_EQ(row.acc, 1);
  EXPECT_DOUBLE_EQ(row.f1, 1.0);
  EXPECT_EQ(row.tokens, 7);
}
