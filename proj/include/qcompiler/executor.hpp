#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/ast.hpp"
#include "qcompiler/chat.hpp"
#include "qcompiler/evalkit.hpp"
#include "qcompiler/portable.hpp"
#include "qcompiler/prompts.hpp"

namespace qcompiler {

struct Document {
  std::string id;
  std::string title;
  std::string content;
  double score = 0.0;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Binding {
  PlaceholderName name;
  std::string value;

  friend bool operator==(const Binding&, const Binding&) = default;
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  /// At most k documents, best first.
  virtual std::vector<Document> retrieve(std::string_view query, std::size_t k) = 0;
  /// False when calls must not overlap; the executor then runs serially.
  virtual bool concurrent_safe() const { return true; }
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const std::vector<Message>& messages) = 0;
  virtual bool concurrent_safe() const { return true; }
};

/// Generator backed by a chat-completion client at temperature 0.
class ChatGenerator : public Generator {
 public:
  explicit ChatGenerator(ChatClient& client, int max_tokens = 512);
  std::string generate(const std::vector<Message>& messages) override;

 private:
  ChatClient& client_;
  int max_tokens_;
};

class UnboundPlaceholder : public std::runtime_error {
 public:
  explicit UnboundPlaceholder(PlaceholderName name);
  const PlaceholderName& name() const noexcept { return name_; }

 private:
  PlaceholderName name_;
};

/// Replaces each `{name}` with its bound value and resolves escapes, giving
/// the literal query text. Throws UnboundPlaceholder.
std::string substitute(std::string_view text, std::span<const Binding> bindings);

/// What a subtree produced, as seen by a Dependent parent.
struct Outcome {
  std::string question;
  std::string answer;
  /// One entry per List child when the subtree is a List or a group.
  std::vector<Outcome> items;
};

/// Values for the right operand's placeholders, from the left operand's
/// outcome: (a) a List outcome with exactly one item per name binds names to
/// item answers in order; (b) otherwise the generator extracts each value
/// from the left question/answer; (c) an empty extraction falls back to the
/// whole left answer. Generator usage is added to `usage` when given.
std::vector<Binding> derive_bindings(const Outcome& left, std::span<const PlaceholderName> names,
                                     Generator& generator, const PromptSet& prompts = {},
                                     TokenCounts* usage = nullptr,
                                     const TokenCounter& counter = default_token_counter());

struct NodeResult {
  NodeKind kind = NodeKind::Atomic;
  bool leaf = false;
  std::string substituted_query;
  std::vector<Document> documents;
  std::string answer;
  std::vector<Binding> bindings_out;
  TokenCounts token_counts;
  double wall_time = 0.0;
};

struct SynthesisResult {
  std::string prompt;
  std::string answer;
  TokenCounts token_counts;
  double wall_time = 0.0;
};

struct ExecutionTrace {
  std::string question;
  std::map<NodePath, NodeResult> nodes;  // lexicographic order == DFS preorder
  SynthesisResult synthesis;
  std::string final_answer;
  TokenCounts totals;
};

enum class ExecutionErrc { UnboundPlaceholder, RetrieverFailure, GeneratorFailure };

std::string_view to_string(ExecutionErrc code);

class ExecutionError : public std::runtime_error {
 public:
  ExecutionError(ExecutionErrc code, NodePath path, const std::string& detail);
  ExecutionErrc code() const noexcept { return code_; }
  const NodePath& path() const noexcept { return path_; }

 private:
  ExecutionErrc code_;
  NodePath path_;
};

struct ExecutionOptions {
  std::size_t top_k = 3;
  /// Maximum number of List children in flight at once.
  std::size_t parallelism = 1;
  /// Original question for the synthesis step; defaults to the root text.
  std::string question;
  PromptSet prompts;
  const TokenCounter* counter = nullptr;
};

/// Interprets a validated tree: leaves retrieve and answer, Dependents bind
/// the right operand's placeholders from the left outcome, Lists run their
/// children concurrently, and a final synthesis call answers the original
/// question from all leaf question/answer pairs.
ExecutionTrace execute(const QueryNode& root, Retriever& retriever, Generator& generator,
                       const ExecutionOptions& options = {});

/// Stable-key-order export. Wall times are included only on request so that
/// exports of deterministic runs compare byte-for-byte.
ordered_json trace_to_json(const ExecutionTrace& trace, bool include_timings = false);

}  // namespace qcompiler
