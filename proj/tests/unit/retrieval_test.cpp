#include <gtest/gtest.h>

#include <fstream>

#include "qcompiler/retrieval.hpp"
#include "testkit.hpp"

using namespace qcompiler;

namespace {

std::vector<std::string> ids(const std::vector<Document>& docs) {
  std::vector<std::string> out;
  for (const auto& d : docs) out.push_back(d.id);
  return out;
}

}  // namespace

TEST(LexicalTokens, CaseFoldedAlphanumericRuns) {
  EXPECT_EQ(lexical_tokens("Who directed Titanic (1997)?"),
            (std::vector<std::string>{"who", "directed", "titanic", "1997"}));
  EXPECT_TRUE(lexical_tokens("?!").empty());
}

TEST(MiniCorpus, HasTwelveUniqueDocuments) {
  const auto docs = testkit::mini_corpus();
  EXPECT_EQ(docs.size(), 12u);
  EXPECT_NO_THROW(LexicalIndex{docs});
}

// Expected scores were computed offline with a separate script over the
// fixture file: title hit 2, content-only hit 1, per distinct query token.
TEST(LexicalIndex, CreatorQueryRanksPaintingFirst) {
  LexicalIndex index(testkit::mini_corpus());
  const auto top = index.retrieve("La Schiavona creator", 2);
  EXPECT_EQ(ids(top), (std::vector<std::string>{"d02", "d01"}));
  EXPECT_EQ(top[0].score, 4.0);
  EXPECT_EQ(top[1].score, 0.0);
}

TEST(LexicalIndex, DeathPlaceQueryRanksTitianFirst) {
  LexicalIndex index(testkit::mini_corpus());
  const auto top = index.retrieve("Where did Titian die?", 3);
  EXPECT_EQ(ids(top), (std::vector<std::string>{"d03", "d02", "d04"}));
  EXPECT_EQ(top[0].score, 2.0);
  EXPECT_EQ(top[1].score, 1.0);
}

TEST(LexicalIndex, FrozenScores) {
  LexicalIndex index(testkit::mini_corpus());
  EXPECT_EQ(ids(index.retrieve("Who is the creator of La Schiavona?", 4)),
            (std::vector<std::string>{"d02", "d05", "d06", "d12"}));
  EXPECT_EQ(index.retrieve("Who is the creator of La Schiavona?", 1)[0].score, 6.0);
  EXPECT_EQ(index.retrieve("Why did Roncalli leave Venice?", 1)[0].score, 3.0);
  EXPECT_EQ(index.retrieve("Who directed Titanic?", 1)[0].score, 3.0);
}

TEST(LexicalIndex, LargeKReturnsWholeCorpusSorted) {
  LexicalIndex index(testkit::mini_corpus());
  const auto all = index.retrieve("Venice", 100);
  ASSERT_EQ(all.size(), 12u);
  EXPECT_EQ(all[0].id, "d05");
  for (std::size_t i = 1; i < all.size(); ++i) {
    EXPECT_TRUE(all[i - 1].score > all[i].score || (all[i - 1].score == all[i].score && all[i - 1].id < all[i].id));
  }
}

TEST(LexicalIndex, NoOverlapReturnsIdOrder) {
  LexicalIndex index(testkit::mini_corpus());
  const auto top = index.retrieve("zzz qqq", 3);
  EXPECT_EQ(ids(top), (std::vector<std::string>{"d01", "d02", "d03"}));
  for (const auto& d : top) EXPECT_EQ(d.score, 0.0);
}

TEST(LexicalIndex, RepeatedQueryTokensCountOnce) {
  LexicalIndex index({{"a", "Venice", "", 0}, {"b", "Other", "venice", 0}});
  EXPECT_EQ(index.score("venice Venice VENICE", 0), 2.0);
  EXPECT_EQ(index.score("venice", 1), 1.0);
}

TEST(LexicalIndex, RejectsBadCorpora) {
  EXPECT_THROW(LexicalIndex({}), std::invalid_argument);
  EXPECT_THROW(LexicalIndex({{"x", "a", "b", 0}, {"x", "c", "d", 0}}), std::invalid_argument);
}

TEST(LoadCorpus, SkipsBlankLinesAndReportsBadOnes) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "qc_corpus_good.jsonl";
  std::ofstream(good) << R"({"id":"1","title":"T","content":"C"})" << "\n\n"
                      << R"({"id":"2","title":"U","content":"D"})" << "\n";
  EXPECT_EQ(load_corpus(good).size(), 2u);
  const auto bad = dir / "qc_corpus_bad.jsonl";
  std::ofstream(bad) << R"({"id":"1","title":"T"})" << "\n";
  EXPECT_THROW(load_corpus(bad), std::runtime_error);
  EXPECT_THROW(load_corpus(dir / "qc_missing.jsonl"), std::runtime_error);
}
