#include "qcompiler/executor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <optional>
#include <thread>

namespace qcompiler {

ChatGenerator::ChatGenerator(ChatClient& client, int max_tokens) : client_(client), max_tokens_(max_tokens) {}

std::string ChatGenerator::generate(const std::vector<Message>& messages) {
  ChatRequest request;
  request.messages = messages;
  request.temperature = 0.0;
  request.max_tokens = max_tokens_;
  return client_.complete(request);
}

UnboundPlaceholder::UnboundPlaceholder(PlaceholderName name)
    : std::runtime_error("no binding for placeholder {" + name + "}"), name_(std::move(name)) {}

std::string substitute(std::string_view text, std::span<const Binding> bindings) {
  const auto occurrences = scan_placeholders(text);
  std::string out;
  out.reserve(text.size());
  std::size_t next = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (next < occurrences.size() && occurrences[next].span.begin == i) {
      const auto& occ = occurrences[next++];
      const auto it = std::find_if(bindings.begin(), bindings.end(),
                                   [&](const Binding& b) { return b.name == occ.name; });
      if (it == bindings.end()) throw UnboundPlaceholder(occ.name);
      out += it->value;
      i = occ.span.end;
      continue;
    }
    if (text[i] == '\\' && i + 1 < text.size()) ++i;
    out.push_back(text[i++]);
  }
  return out;
}

std::string_view to_string(ExecutionErrc code) {
  switch (code) {
    case ExecutionErrc::UnboundPlaceholder: return "UnboundPlaceholder";
    case ExecutionErrc::RetrieverFailure: return "RetrieverFailure";
    case ExecutionErrc::GeneratorFailure: return "GeneratorFailure";
  }
  return "?";
}

ExecutionError::ExecutionError(ExecutionErrc code, NodePath path, const std::string& detail)
    : std::runtime_error(std::string{to_string(code)} + " at " + format_path(path) + ": " + detail),
      code_(code),
      path_(std::move(path)) {}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Binding values are substituted into retrieval queries; braces would read
/// as unresolved placeholders there.
std::string binding_value(std::string_view text) {
  std::string out;
  for (char c : trim(text)) {
    if (c != '{' && c != '}') out.push_back(c);
  }
  return out;
}

std::vector<Binding> merge_bindings(const std::vector<Binding>& inherited, const std::vector<Binding>& derived) {
  std::vector<Binding> merged = derived;
  for (const auto& b : inherited) {
    const bool shadowed = std::any_of(derived.begin(), derived.end(), [&](const Binding& d) { return d.name == b.name; });
    if (!shadowed) merged.push_back(b);
  }
  return merged;
}

NodePath child_path(const NodePath& path, std::size_t index) {
  NodePath out = path;
  out.push_back(index);
  return out;
}

std::string join(const std::vector<Outcome>& items, std::string Outcome::*field, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i].*field;
  }
  return out;
}

struct SubtreeRun {
  Outcome outcome;
  std::map<NodePath, NodeResult> nodes;
};

class Interpreter {
 public:
  Interpreter(Retriever& retriever, Generator& generator, const ExecutionOptions& options, std::size_t width)
      : retriever_(retriever),
        generator_(generator),
        options_(options),
        counter_(options.counter ? *options.counter : default_token_counter()),
        width_(width) {}

  SubtreeRun run(const QueryNode& node, const NodePath& path, const std::vector<Binding>& bindings) {
    switch (node.kind()) {
      case NodeKind::Atomic: return node.is_leaf() ? leaf(node, path, bindings) : wrapper(node, path, bindings);
      case NodeKind::Dependent: return dependent(node, path, bindings);
      case NodeKind::List: return list(node, path, bindings);
      case NodeKind::Complex: return wrapper(node, path, bindings);
    }
    return {};
  }

 private:
  SubtreeRun leaf(const QueryNode& node, const NodePath& path, const std::vector<Binding>& bindings) {
    const auto start = Clock::now();
    NodeResult result;
    result.kind = NodeKind::Atomic;
    result.leaf = true;
    try {
      result.substituted_query = substitute(node.value(), bindings);
    } catch (const UnboundPlaceholder& e) {
      throw ExecutionError(ExecutionErrc::UnboundPlaceholder, path, e.what());
    }
    try {
      result.documents = retriever_.retrieve(result.substituted_query, options_.top_k);
    } catch (const std::exception& e) {
      throw ExecutionError(ExecutionErrc::RetrieverFailure, path, e.what());
    }

    std::string block;
    std::int64_t document_tokens = 0;
    for (std::size_t i = 0; i < result.documents.size(); ++i) {
      const auto& doc = result.documents[i];
      if (i > 0) block += "\n\n";
      block += "[" + std::to_string(i + 1) + "] " + doc.title + "\n" + doc.content;
      document_tokens += counter_.count(doc.title) + counter_.count(doc.content);
    }
    const auto prompt = render_template(options_.prompts.leaf_answer,
                                        {{"documents", block}, {"question", result.substituted_query}});
    try {
      result.answer = generator_.generate({{"user", prompt}});
    } catch (const std::exception& e) {
      throw ExecutionError(ExecutionErrc::GeneratorFailure, path, e.what());
    }
    result.token_counts.documents = document_tokens;
    result.token_counts.prompt = std::max<std::int64_t>(0, counter_.count(prompt) - document_tokens);
    result.token_counts.response = counter_.count(result.answer);
    result.wall_time = seconds_since(start);

    SubtreeRun run;
    run.outcome = {result.substituted_query, result.answer, {}};
    run.nodes.emplace(path, std::move(result));
    return run;
  }

  // Groups and the Complex root forward to their single child.
  SubtreeRun wrapper(const QueryNode& node, const NodePath& path, const std::vector<Binding>& bindings) {
    const auto start = Clock::now();
    auto run = this->run(node.children()[0], child_path(path, 0), bindings);
    NodeResult result;
    result.kind = node.kind();
    result.substituted_query = node.value();
    result.answer = run.outcome.answer;
    result.wall_time = seconds_since(start);
    run.nodes.emplace(path, std::move(result));
    return run;
  }

  SubtreeRun dependent(const QueryNode& node, const NodePath& path, const std::vector<Binding>& bindings) {
    const auto start = Clock::now();
    auto left = run(node.children()[0], child_path(path, 0), bindings);

    const auto& right_node = node.children()[1];
    TokenCounts usage;
    std::vector<Binding> derived;
    if (!right_node.placeholders().empty()) {
      try {
        derived = derive_bindings(left.outcome, right_node.placeholders(), generator_, options_.prompts, &usage,
                                  counter_);
      } catch (const std::exception& e) {
        throw ExecutionError(ExecutionErrc::GeneratorFailure, path, e.what());
      }
    }
    auto right = run(right_node, child_path(path, 1), merge_bindings(bindings, derived));

    NodeResult result;
    result.kind = NodeKind::Dependent;
    result.substituted_query = node.value();
    result.answer = right.outcome.answer;
    result.bindings_out = std::move(derived);
    result.token_counts = usage;
    result.wall_time = seconds_since(start);

    SubtreeRun out;
    out.outcome = std::move(right.outcome);
    out.nodes = std::move(left.nodes);
    out.nodes.merge(right.nodes);
    out.nodes.emplace(path, std::move(result));
    return out;
  }

  SubtreeRun list(const QueryNode& node, const NodePath& path, const std::vector<Binding>& bindings) {
    const auto start = Clock::now();
    const auto& children = node.children();
    std::vector<std::optional<SubtreeRun>> runs(children.size());
    std::vector<std::exception_ptr> errors(children.size());

    const std::size_t width = std::min(width_, children.size());
    if (width <= 1) {
      for (std::size_t i = 0; i < children.size(); ++i) runs[i] = run(children[i], child_path(path, i), bindings);
    } else {
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < children.size(); i = next++) {
          try {
            runs[i] = run(children[i], child_path(path, i), bindings);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      };
      std::vector<std::jthread> pool;
      pool.reserve(width);
      for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    SubtreeRun out;
    for (auto& r : runs) {
      out.outcome.items.push_back(std::move(r->outcome));
      out.nodes.merge(r->nodes);
    }
    out.outcome.question = join(out.outcome.items, &Outcome::question, "; ");
    out.outcome.answer = join(out.outcome.items, &Outcome::answer, "\n");

    NodeResult result;
    result.kind = NodeKind::List;
    result.substituted_query = node.value();
    result.answer = out.outcome.answer;
    result.wall_time = seconds_since(start);
    out.nodes.emplace(path, std::move(result));
    return out;
  }

  Retriever& retriever_;
  Generator& generator_;
  const ExecutionOptions& options_;
  const TokenCounter& counter_;
  std::size_t width_;
};

ordered_json tokens_json(const TokenCounts& t) {
  ordered_json doc;
  doc["prompt"] = t.prompt;
  doc["documents"] = t.documents;
  doc["response"] = t.response;
  return doc;
}

}  // namespace

std::vector<Binding> derive_bindings(const Outcome& left, std::span<const PlaceholderName> names,
                                     Generator& generator, const PromptSet& prompts, TokenCounts* usage,
                                     const TokenCounter& counter) {
  std::vector<Binding> bindings;
  if (!left.items.empty() && left.items.size() == names.size()) {
    for (std::size_t i = 0; i < names.size(); ++i) bindings.push_back({names[i], binding_value(left.items[i].answer)});
    return bindings;
  }
  for (const auto& name : names) {
    const auto prompt = render_template(prompts.binding_extraction,
                                        {{"name", name}, {"question", left.question}, {"answer", left.answer}});
    const auto reply = generator.generate({{"user", prompt}});
    if (usage) {
      usage->prompt += counter.count(prompt);
      usage->response += counter.count(reply);
    }
    auto value = binding_value(reply);
    if (value.empty()) value = binding_value(left.answer);
    bindings.push_back({name, std::move(value)});
  }
  return bindings;
}

ExecutionTrace execute(const QueryNode& root, Retriever& retriever, Generator& generator,
                       const ExecutionOptions& options) {
  if (options.top_k == 0) throw std::invalid_argument("top_k must be at least 1");
  std::size_t width = std::max<std::size_t>(1, options.parallelism);
  if (!retriever.concurrent_safe() || !generator.concurrent_safe()) width = 1;

  Interpreter interpreter(retriever, generator, options, width);
  auto run = interpreter.run(root, {}, {});

  ExecutionTrace trace;
  trace.question = options.question.empty() ? root.value() : options.question;
  trace.nodes = std::move(run.nodes);

  std::string sub_answers;
  std::size_t n = 0;
  for (const auto& [path, result] : trace.nodes) {
    if (!result.leaf) continue;
    ++n;
    if (!sub_answers.empty()) sub_answers += "\n";
    sub_answers += "Sub-question " + std::to_string(n) + ": " + result.substituted_query + "\n";
    sub_answers += "Answer " + std::to_string(n) + ": " + result.answer;
  }

  const auto& counter = options.counter ? *options.counter : default_token_counter();
  const auto start = Clock::now();
  auto& synthesis = trace.synthesis;
  synthesis.prompt = render_template(options.prompts.synthesis, {{"question", trace.question}, {"sub_answers", sub_answers}});
  try {
    synthesis.answer = generator.generate({{"user", synthesis.prompt}});
  } catch (const std::exception& e) {
    throw ExecutionError(ExecutionErrc::GeneratorFailure, {}, e.what());
  }
  synthesis.token_counts.prompt = counter.count(synthesis.prompt);
  synthesis.token_counts.response = counter.count(synthesis.answer);
  synthesis.wall_time = seconds_since(start);

  trace.final_answer = synthesis.answer;
  for (const auto& [path, result] : trace.nodes) trace.totals += result.token_counts;
  trace.totals += synthesis.token_counts;
  return trace;
}

ordered_json trace_to_json(const ExecutionTrace& trace, bool include_timings) {
  ordered_json doc;
  doc["question"] = trace.question;
  auto nodes = ordered_json::array();
  for (const auto& [path, r] : trace.nodes) {
    ordered_json item;
    item["path"] = path;
    item["kind"] = std::string{to_string(r.kind)};
    item["leaf"] = r.leaf;
    item["substituted_query"] = r.substituted_query;
    auto docs = ordered_json::array();
    for (const auto& d : r.documents) {
      ordered_json dj;
      dj["id"] = d.id;
      dj["title"] = d.title;
      dj["content"] = d.content;
      dj["score"] = d.score;
      docs.push_back(std::move(dj));
    }
    item["documents"] = std::move(docs);
    item["answer"] = r.answer;
    auto bindings = ordered_json::array();
    for (const auto& b : r.bindings_out) {
      ordered_json bj;
      bj["name"] = b.name;
      bj["value"] = b.value;
      bindings.push_back(std::move(bj));
    }
    item["bindings"] = std::move(bindings);
    item["token_counts"] = tokens_json(r.token_counts);
    if (include_timings) item["wall_time"] = r.wall_time;
    nodes.push_back(std::move(item));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json synthesis;
  synthesis["prompt"] = trace.synthesis.prompt;
  synthesis["answer"] = trace.synthesis.answer;
  synthesis["token_counts"] = tokens_json(trace.synthesis.token_counts);
  if (include_timings) synthesis["wall_time"] = trace.synthesis.wall_time;
  doc["synthesis"] = std::move(synthesis);
  doc["final_answer"] = trace.final_answer;
  doc["totals"] = tokens_json(trace.totals);
  return doc;
}

}  // namespace qcompiler
