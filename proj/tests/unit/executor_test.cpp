#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <thread>

#include "qcompiler/executor.hpp"
#include "qcompiler/parser.hpp"
#include "qcompiler/retrieval.hpp"
#include "qcompiler/scripted.hpp"
#include "testkit.hpp"

using namespace qcompiler;
using Rules = std::vector<ScriptedBackend::Rule>;
using namespace std::chrono_literals;

namespace {

std::filesystem::path schiavona_script() { return testkit::data_dir() / "scripts" / "la_schiavona.json"; }

class ThrowingRetriever : public Retriever {
 public:
  std::vector<Document> retrieve(std::string_view, std::size_t) override { throw TransportError("index offline"); }
};

class FixedRetriever : public Retriever {
 public:
  std::vector<Document> retrieve(std::string_view query, std::size_t) override {
    std::lock_guard lock(mutex_);
    queries.emplace_back(query);
    return {{"d1", "Title", "Body text.", 1.0}};
  }
  std::vector<std::string> queries;

 private:
  std::mutex mutex_;
};

/// Tracks the largest number of overlapping calls.
class OverlapGenerator : public Generator {
 public:
  explicit OverlapGenerator(bool safe) : safe_(safe) {}
  std::string generate(const std::vector<Message>&) override {
    const int now = ++in_flight_;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(20ms);
    --in_flight_;
    return "ok";
  }
  bool concurrent_safe() const override { return safe_; }
  std::atomic<int> peak{0};

 private:
  bool safe_;
  std::atomic<int> in_flight_{0};
};

ExecutionTrace run_schiavona(Retriever& retriever, Generator& generator, std::size_t parallelism = 1) {
  ExecutionOptions options;
  options.question = testkit::kSchiavonaQuestion;
  options.parallelism = parallelism;
  return execute(parse(testkit::kSchiavonaExpression), retriever, generator, options);
}

TokenCounts recomputed_totals(const ExecutionTrace& trace) {
  TokenCounts sum;
  for (const auto& [path, node] : trace.nodes) {
    sum.prompt += node.token_counts.prompt;
    sum.documents += node.token_counts.documents;
    sum.response += node.token_counts.response;
  }
  sum.prompt += trace.synthesis.token_counts.prompt;
  sum.documents += trace.synthesis.token_counts.documents;
  sum.response += trace.synthesis.token_counts.response;
  return sum;
}

}  // namespace

TEST(Substitute, Examples) {
  const std::vector<Binding> creator{{"creator", "Titian"}};
  EXPECT_EQ(substitute("Where did {creator} die?", creator), "Where did Titian die?");
  EXPECT_EQ(substitute("no holes", {}), "no holes");
  const std::vector<Binding> a{{"a", "x"}};
  EXPECT_EQ(substitute("{a} {a}", a), "x x");
}

TEST(Substitute, ResolvesEscapes) {
  const std::vector<Binding> b{{"n", "4"}};
  EXPECT_EQ(substitute("is 2\\+2 = {n} \\{n\\}", b), "is 2+2 = 4 {n}");
}

TEST(Substitute, Unbound) {
  try {
    substitute("Where did {creator} die?", {});
    FAIL();
  } catch (const UnboundPlaceholder& e) {
    EXPECT_EQ(e.name(), "creator");
  }
}

TEST(DeriveBindings, ExtractsWithGenerator) {
  ScriptedBackend backend(Rules{{"state only the value of creator", {"Titian"}}});
  const Outcome left{"Who is the creator of La Schiavona?", "The creator of La Schiavona is Titian...", {}};
  const std::vector<PlaceholderName> names{"creator"};
  TokenCounts usage;
  const auto bindings = derive_bindings(left, names, backend, {}, &usage);
  EXPECT_EQ(bindings, (std::vector<Binding>{{"creator", "Titian"}}));
  ASSERT_EQ(backend.call_count(), 1u);
  const auto prompt = backend.calls()[0][0].content;
  EXPECT_NE(prompt.find("Question: Who is the creator of La Schiavona?"), std::string::npos);
  EXPECT_NE(prompt.find("Answer: The creator of La Schiavona is Titian..."), std::string::npos);
  EXPECT_EQ(usage.prompt, count_tokens(prompt));
  EXPECT_EQ(usage.response, 1);
}

TEST(DeriveBindings, ListLeftMatchesByOrderWithoutGenerator) {
  ScriptedBackend backend;
  const Outcome left{"q1; q2", "South America\nPortugal", {{"q1", "South America", {}}, {"q2", "Portugal", {}}}};
  const std::vector<PlaceholderName> names{"continent", "country"};
  const auto bindings = derive_bindings(left, names, backend);
  EXPECT_EQ(bindings, (std::vector<Binding>{{"continent", "South America"}, {"country", "Portugal"}}));
  EXPECT_EQ(backend.call_count(), 0u);
}

TEST(DeriveBindings, CountMismatchFallsBackToExtraction) {
  ScriptedBackend backend(Rules{{"value of x", {"joined"}}});
  const Outcome left{"q1; q2", "A\nB", {{"q1", "A", {}}, {"q2", "B", {}}}};
  const std::vector<PlaceholderName> names{"x"};
  EXPECT_EQ(derive_bindings(left, names, backend)[0].value, "joined");
  EXPECT_NE(backend.calls()[0][0].content.find("Answer: A\nB"), std::string::npos);
}

TEST(DeriveBindings, EmptyExtractionUsesWholeAnswer) {
  ScriptedBackend backend(Rules{}, "   ");
  const Outcome left{"q", "Full answer text.", {}};
  const std::vector<PlaceholderName> names{"x"};
  EXPECT_EQ(derive_bindings(left, names, backend)[0].value, "Full answer text.");
}

TEST(DeriveBindings, StripsBraces) {
  ScriptedBackend backend(Rules{}, "{Venice}");
  const Outcome left{"q", "a", {}};
  const std::vector<PlaceholderName> names{"x"};
  EXPECT_EQ(derive_bindings(left, names, backend)[0].value, "Venice");
}

TEST(Execute, SchiavonaOverMiniCorpus) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend backend(schiavona_script());
  const auto trace = run_schiavona(index, backend);

  const auto golds = split_aliases("for the conclave in Rome; Rome; Roma");
  EXPECT_EQ(accuracy(trace.final_answer, golds), 1);
  EXPECT_NE(trace.final_answer.find("conclave in Rome"), std::string::npos);
  EXPECT_EQ(trace.question, testkit::kSchiavonaQuestion);

  EXPECT_EQ(trace.nodes.size(), 6u);
  EXPECT_EQ(trace.nodes.at({0, 0, 0}).substituted_query, "Who is the creator of La Schiavona?");
  EXPECT_EQ(trace.nodes.at({0, 0, 1}).substituted_query, "Where did Titian die?");
  EXPECT_EQ(trace.nodes.at({0, 1}).substituted_query, "Why did Roncalli leave Venice?");
  EXPECT_EQ(trace.nodes.at({0, 0}).bindings_out, (std::vector<Binding>{{"creator", "Titian"}}));
  EXPECT_EQ(trace.nodes.at({0}).bindings_out, (std::vector<Binding>{{"city", "Venice"}}));
  EXPECT_EQ(trace.nodes.at({0, 0, 0}).documents.at(0).id, "d02");
  EXPECT_EQ(trace.nodes.at({0, 0, 1}).documents.at(0).id, "d03");
  EXPECT_EQ(trace.nodes.at({0, 1}).documents.at(0).id, "d04");
  EXPECT_EQ(trace.nodes.at({0, 1}).documents.size(), 3u);
  EXPECT_EQ(trace.nodes.at({}).kind, NodeKind::Complex);
}

TEST(Execute, TotalsAreExactSums) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend backend(schiavona_script());
  const auto trace = run_schiavona(index, backend);
  EXPECT_EQ(trace.totals, recomputed_totals(trace));
  EXPECT_GT(trace.totals.documents, 0);
  for (const auto& [path, node] : trace.nodes) {
    EXPECT_GE(node.token_counts.prompt, 0);
    EXPECT_GE(node.token_counts.documents, 0);
    EXPECT_GE(node.token_counts.response, 0);
  }
}

TEST(Execute, LeafTokenAccounting) {
  FixedRetriever retriever;
  ScriptedBackend backend(Rules{}, "Fine.");
  const auto trace = execute(parse("Who directed Titanic?"), retriever, backend);
  const auto& leaf = trace.nodes.at({0});
  EXPECT_EQ(leaf.token_counts.documents, count_tokens("Title") + count_tokens("Body text."));
  const auto prompt = backend.calls().at(0).at(0).content;
  EXPECT_EQ(prompt, "Answer the question using only the documents.\nDocuments:\n[1] Title\nBody text.\n"
                    "Question: Who directed Titanic?\n");
  EXPECT_EQ(leaf.token_counts.prompt, count_tokens(prompt) - leaf.token_counts.documents);
  EXPECT_EQ(leaf.token_counts.response, 2);
}

TEST(Execute, DependentRightStartsAfterLeftFinishes) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend backend(schiavona_script());
  testkit::CallLog log;
  testkit::InstrumentedRetriever retriever(index, log);
  testkit::InstrumentedGenerator generator(backend, log);
  run_schiavona(retriever, generator);

  const auto entries = log.entries();
  auto first_index = [&](std::string_view needle) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].what.find(needle) != std::string::npos) return i;
    }
    ADD_FAILURE() << "no call containing " << needle;
    return entries.size();
  };
  const auto left_done = first_index("value of creator");
  const auto right_start = first_index("retrieve:Where did Titian die?");
  ASSERT_LT(left_done, entries.size());
  ASSERT_LT(right_start, entries.size());
  for (std::size_t i = 0; i < right_start; ++i) EXPECT_LE(entries[i].end, entries[right_start].start);
  EXPECT_LT(first_index("Question: Who is the creator"), right_start);
  EXPECT_LT(first_index("value of city"), first_index("retrieve:Why did Roncalli leave Venice?"));
}

TEST(Execute, RetrievalQueriesHaveNoPlaceholders) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend backend(schiavona_script());
  testkit::CallLog log;
  testkit::InstrumentedRetriever retriever(index, log);
  run_schiavona(retriever, backend);
  ASSERT_EQ(log.entries().size(), 3u);
  for (const auto& e : log.entries()) EXPECT_EQ(e.what.find('{'), std::string::npos) << e.what;
}

TEST(Execute, DeterministicTraceBytes) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend first(schiavona_script());
  ScriptedBackend second(schiavona_script());
  const auto a = trace_to_json(run_schiavona(index, first)).dump(2);
  const auto b = trace_to_json(run_schiavona(index, second)).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall_time"), std::string::npos);
  EXPECT_NE(trace_to_json(run_schiavona(index, first), true).dump().find("wall_time"), std::string::npos);
}

TEST(Execute, SingleAtomicMakesThreeCalls) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend backend(schiavona_script());
  testkit::CallLog log;
  testkit::InstrumentedRetriever retriever(index, log);
  ExecutionOptions options;
  options.top_k = 1;
  const auto trace = execute(parse("Who directed Titanic?"), retriever, backend, options);
  EXPECT_EQ(log.entries().size(), 1u);
  EXPECT_EQ(backend.call_count(), 2u);
  EXPECT_EQ(trace.nodes.at({0}).documents.size(), 1u);
  EXPECT_EQ(trace.nodes.at({0}).documents[0].id, "d09");
  EXPECT_EQ(trace.final_answer, "James Cameron");
}

TEST(Execute, SynthesisEnumeratesLeavesInOrder) {
  FixedRetriever retriever;
  ScriptedBackend backend(Rules{{"value of x", {"X"}}}, "ans");
  const auto trace = execute(parse("a + b * c {x}"), retriever, backend);
  EXPECT_EQ(trace.synthesis.prompt,
            "Use the sub-questions and their answers to answer the original question.\n"
            "Original question: a + b * c {x}\n"
            "Sub-question 1: a\nAnswer 1: ans\n"
            "Sub-question 2: b\nAnswer 2: ans\n"
            "Sub-question 3: c X\nAnswer 3: ans\n");
}

TEST(Execute, ListChildrenDoNotShareBindings) {
  FixedRetriever retriever;
  ScriptedBackend backend(Rules{{"value of y", {"outer", "inner"}}, {"value of x", {"X"}}}, "ans");
  execute(parse("s * (b {x} * c {y} + d {y})"), retriever, backend);
  const auto& q = retriever.queries;
  EXPECT_NE(std::find(q.begin(), q.end(), "c inner"), q.end());
  EXPECT_NE(std::find(q.begin(), q.end(), "d outer"), q.end());
}

TEST(Execute, ListOutcomeFeedsOrderedBindings) {
  FixedRetriever retriever;
  ScriptedBackend backend(Rules{{"Question: p", {"P"}}, {"Question: q", {"Q"}}}, "ans");
  execute(parse("(p + q) * r {first} {second}"), retriever, backend);
  EXPECT_EQ(retriever.queries.back(), "r P Q");
}

TEST(Execute, ListChildrenOverlapWhenParallel) {
  FixedRetriever retriever;
  OverlapGenerator generator(true);
  ExecutionOptions options;
  options.parallelism = 3;
  execute(parse("a + b + c"), retriever, generator, options);
  EXPECT_EQ(generator.peak.load(), 3);
}

TEST(Execute, SerialBackendDisablesConcurrency) {
  FixedRetriever retriever;
  OverlapGenerator generator(false);
  ExecutionOptions options;
  options.parallelism = 3;
  execute(parse("a + b + c"), retriever, generator, options);
  EXPECT_EQ(generator.peak.load(), 1);
}

TEST(Execute, ParallelTraceMatchesSerialTrace) {
  LexicalIndex index(testkit::mini_corpus());
  ScriptedBackend serial(Rules{}, "same");
  ScriptedBackend parallel(Rules{}, "same");
  const auto root = parse("(a + b + c) * d {x} + e * (f {y} + g {y})");
  ExecutionOptions one;
  ExecutionOptions four;
  four.parallelism = 4;
  EXPECT_EQ(trace_to_json(execute(root, index, serial, one)), trace_to_json(execute(root, index, parallel, four)));
}

TEST(Execute, RetrieverFailureCarriesPath) {
  ThrowingRetriever retriever;
  ScriptedBackend backend;
  try {
    execute(parse("a + b"), retriever, backend);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.code(), ExecutionErrc::RetrieverFailure);
    EXPECT_EQ(e.path(), (NodePath{0, 0}));
  }
}

TEST(Execute, LowestFailingSiblingIsReported) {
  ThrowingRetriever retriever;
  ScriptedBackend backend;
  ExecutionOptions options;
  options.parallelism = 4;
  try {
    execute(parse("a + b + c + d"), retriever, backend, options);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.path(), (NodePath{0, 0}));
  }
}

TEST(Execute, GeneratorFailures) {
  class Broken : public Generator {
   public:
    std::string generate(const std::vector<Message>& m) override {
      if (m.back().content.find(fail_on) != std::string::npos) throw TransportError("boom");
      return "ok";
    }
    std::string fail_on;
  } broken;
  FixedRetriever retriever;

  broken.fail_on = "Question: b";
  try {
    execute(parse("a * b {x}"), retriever, broken);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.code(), ExecutionErrc::GeneratorFailure);
    EXPECT_EQ(e.path(), (NodePath{0, 1}));
  }

  broken.fail_on = "value of x";
  try {
    execute(parse("a * b {x}"), retriever, broken);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.path(), (NodePath{0}));
  }

  broken.fail_on = "Original question";
  try {
    execute(parse("a"), retriever, broken);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.path(), NodePath{});
  }
}

TEST(Execute, UnboundPlaceholderIsDefensive) {
  FixedRetriever retriever;
  ScriptedBackend backend;
  try {
    execute(parse("a {x}"), retriever, backend);
    FAIL();
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.code(), ExecutionErrc::UnboundPlaceholder);
    EXPECT_EQ(e.path(), (NodePath{0}));
  }
}

TEST(Execute, RejectsZeroTopK) {
  FixedRetriever retriever;
  ScriptedBackend backend;
  ExecutionOptions options;
  options.top_k = 0;
  EXPECT_THROW(execute(parse("a"), retriever, backend, options), std::invalid_argument);
}

TEST(TraceJson, KeyOrder) {
  FixedRetriever retriever;
  ScriptedBackend backend;
  const auto doc = trace_to_json(execute(parse("a"), retriever, backend));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"question", "nodes", "synthesis", "final_answer", "totals"}));
  EXPECT_EQ(doc["nodes"][1]["path"], ordered_json::array({0}));
  EXPECT_EQ(doc["nodes"][1]["documents"][0]["id"], "d1");
}
