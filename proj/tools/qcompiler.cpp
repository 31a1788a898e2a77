// qcompiler: compile, inspect, validate and execute query expressions.
//
// Exit codes: 0 ok, 1 invalid expression, 2 parse/lex/schema error,
// 3 configuration or transport error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcompiler/config.hpp"
#include "qcompiler/evalkit.hpp"
#include "qcompiler/executor.hpp"
#include "qcompiler/parser.hpp"
#include "qcompiler/portable.hpp"
#include "qcompiler/retrieval.hpp"
#include "qcompiler/scripted.hpp"
#include "qcompiler/translator.hpp"
#include "qcompiler/validator.hpp"

namespace fs = std::filesystem;
using namespace qcompiler;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kSyntax = 2, kConfig = 3 };

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BackendFlags {
  std::string config;
  std::string offline;
  std::string corpus;
  std::size_t k = 0;
  std::size_t parallelism = 0;

  void attach(CLI::App* cmd, bool execution) {
    cmd->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--offline", offline, "answer from a scripted backend instead of an endpoint")
        ->check(CLI::ExistingFile);
    if (!execution) return;
    cmd->add_option("--corpus", corpus, "JSON lines corpus for the built-in lexical retriever")
        ->check(CLI::ExistingFile);
    cmd->add_option("-k,--top-k", k, "documents per leaf query")->check(CLI::PositiveNumber);
    cmd->add_option("--parallelism", parallelism, "List children in flight at once")->check(CLI::PositiveNumber);
  }

  Config load() const {
    Config c = load_config(config.empty() ? std::nullopt : std::optional<fs::path>{config});
    if (!offline.empty()) c.script = offline;
    if (!corpus.empty()) c.corpus = corpus;
    if (k) c.top_k = k;
    if (parallelism) c.parallelism = parallelism;
    return c;
  }
};

/// Chat, generator and retriever backends resolved from a config.
class Backends {
 public:
  explicit Backends(const Config& config) : config_(config) {
    if (!config.script.empty()) scripted_ = std::make_unique<ScriptedBackend>(config.script);
  }

  ChatClient& translator_client() {
    if (scripted_) return *scripted_;
    if (!translator_) translator_ = std::make_unique<HttpChatClient>(endpoint(config_.translator_endpoint()));
    return *translator_;
  }

  Generator& generator() {
    if (scripted_) return *scripted_;
    if (!generator_) {
      generator_client_ = std::make_unique<HttpChatClient>(endpoint(config_.generator_endpoint()));
      generator_ = std::make_unique<ChatGenerator>(*generator_client_);
    }
    return *generator_;
  }

  Retriever& retriever() {
    if (retriever_) return *retriever_;
    if (!config_.corpus.empty()) {
      retriever_ = std::make_unique<LexicalIndex>(load_corpus(config_.corpus));
    } else if (!config_.retriever_endpoint.empty()) {
      retriever_ = std::make_unique<HttpRetriever>(config_.retriever_endpoint, config_.timeout);
    } else {
      throw ConfigError("no retriever: set \"corpus\" or \"endpoints.retriever\", or pass --corpus");
    }
    return *retriever_;
  }

 private:
  static EndpointConfig endpoint(EndpointConfig e) {
    if (e.url.empty()) throw ConfigError("no chat endpoint: set \"endpoints.chat\" or QC_ENDPOINT, or pass --offline");
    if (e.model.empty()) throw ConfigError("no model name: set \"models\" or QC_MODEL");
    return e;
  }

  const Config& config_;
  std::unique_ptr<ScriptedBackend> scripted_;
  std::unique_ptr<HttpChatClient> translator_;
  std::unique_ptr<HttpChatClient> generator_client_;
  std::unique_ptr<ChatGenerator> generator_;
  std::unique_ptr<Retriever> retriever_;
};

void print_rejections(const std::vector<Rejection>& rejected) {
  for (const auto& r : rejected) std::cerr << "rejected: " << r.expression << "\n  " << describe(r.reason) << '\n';
}

QueryNode translate_query(Backends& backends, const Config& config, const std::string& query) {
  Translator translator(backends.translator_client(), config.prompts);
  auto result = translator.translate(query, config.schedule);
  print_rejections(result.rejected);
  return std::move(result.ast);
}

QueryNode require_valid(QueryNode ast) {
  const auto report = validate(ast);
  if (!report.valid) {
    for (const auto& v : report.violations) {
      std::cerr << to_string(v.kind) << " at " << format_path(v.node_path) << ": " << v.message << '\n';
    }
    throw InvalidInput("expression is not valid");
  }
  return ast;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    const auto t = trim(line);
    if (!t.empty()) lines.emplace_back(t);
  }
  return lines;
}

int cmd_compile(const std::string& expression, const std::string& from_query, bool compact,
                const BackendFlags& flags) {
  if (expression.empty() == from_query.empty()) throw CLI::ValidationError("compile", "give an EXPRESSION or --from-query");
  QueryNode ast = [&] {
    if (!expression.empty()) return parse(expression);
    const auto config = flags.load();
    Backends backends(config);
    return translate_query(backends, config, from_query);
  }();
  std::cout << dump_ast(ast, compact) << '\n';
  return kOk;
}

int cmd_validate(const std::string& expression, const std::string& ast_file, bool strict) {
  if (expression.empty() == ast_file.empty()) throw CLI::ValidationError("validate", "give an EXPRESSION or --ast");
  const QueryNode ast = expression.empty() ? load_ast(read_text_file(ast_file)) : parse(expression);
  const auto report = validate(ast, {strict});
  std::cout << report_to_json(report).dump(2) << '\n';
  for (const auto& v : report.violations) {
    std::cerr << to_string(v.kind) << " at " << format_path(v.node_path) << ": " << v.message << '\n';
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return report.valid ? kOk : kInvalid;
}

struct RunFlags {
  std::string question;
  std::string expression;
  std::string trace;
  bool timings = false;
};

int cmd_run(const RunFlags& run, const BackendFlags& flags) {
  const auto config = flags.load();
  Backends backends(config);
  const QueryNode ast =
      require_valid(run.expression.empty() ? translate_query(backends, config, run.question) : parse(run.expression));
  ExecutionOptions options;
  options.top_k = config.top_k;
  options.parallelism = config.parallelism;
  options.question = run.question;
  options.prompts = config.prompts;
  const auto trace = execute(ast, backends.retriever(), backends.generator(), options);
  if (!run.trace.empty()) open_output(run.trace) << trace_to_json(trace, run.timings).dump(2) << '\n';
  std::cout << trace.final_answer << '\n';
  return kOk;
}

int cmd_eval(const std::string& dataset, const std::string& out_path, const BackendFlags& flags) {
  const auto config = flags.load();
  Backends backends(config);
  std::vector<MetricRow> rows;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(dataset)) {
    ++line_no;
    nlohmann::json item;
    try {
      item = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaViolation(dataset + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!item.is_object() || !item.contains("question") || !item.contains("golds") || !item["golds"].is_array()) {
      throw SchemaViolation(dataset + ":" + std::to_string(line_no) + ": expected {\"id\", \"question\", \"golds\"}");
    }
    const auto question = item["question"].get<std::string>();
    const auto id = item.value("id", std::to_string(line_no));
    std::vector<std::string> golds;
    for (const auto& g : item["golds"]) {
      for (auto& alias : split_aliases(g.get<std::string>())) golds.push_back(std::move(alias));
    }

    std::string prediction;
    TokenCounts tokens;
    try {
      const QueryNode ast = require_valid(item.contains("expression") ? parse(item["expression"].get<std::string>())
                                                                      : translate_query(backends, config, question));
      ExecutionOptions options;
      options.top_k = config.top_k;
      options.parallelism = config.parallelism;
      options.question = question;
      options.prompts = config.prompts;
      const auto trace = execute(ast, backends.retriever(), backends.generator(), options);
      prediction = trace.final_answer;
      tokens = trace.totals;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << id << ": " << e.what() << '\n';
    }
    rows.push_back(score_prediction(id, prediction, golds, tokens.total()));
  }
  const auto report = aggregate_run(rows);
  const auto doc = run_report_to_json(report, rows).dump(2);
  if (!out_path.empty()) open_output(out_path) << doc << '\n';
  std::cout << doc << '\n';
  std::cerr << "EM " << format_percent(report.em) << "  Acc " << format_percent(report.acc) << "  F1 "
            << format_percent(report.f1) << "  tokens/query " << format_percent(report.tokens_per_query) << '\n';
  return kOk;
}

int cmd_gen_data(const std::string& questions_file, const std::string& out_path, const BackendFlags& flags) {
  const auto config = flags.load();
  Backends backends(config);
  const auto questions = read_lines(questions_file);
  Translator translator(backends.translator_client(), config.prompts);
  auto out = open_output(out_path);
  const auto report = translator.build_training_pairs(questions, config.schedule, out);
  nlohmann::ordered_json summary;
  summary["kept"] = report.kept;
  summary["dropped"] = report.dropped;
  auto drops = nlohmann::ordered_json::array();
  for (const auto& d : report.drops) {
    nlohmann::ordered_json item;
    item["question"] = d.question;
    item["reason"] = std::string{to_string(d.reason)};
    item["detail"] = d.detail;
    drops.push_back(std::move(item));
  }
  summary["drops"] = std::move(drops);
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile natural-language questions into query expressions and execute them"};
  app.require_subcommand(1);

  std::string expression, from_query, ast_file, dataset, out_path;
  bool compact = false, strict = false;
  BackendFlags backend_flags;
  RunFlags run_flags;

  auto* compile = app.add_subcommand("compile", "parse an expression (or translate a query) and print its AST");
  compile->add_option("expression", expression, "query expression");
  compile->add_option("--from-query", from_query, "translate this question first");
  compile->add_flag("--compact", compact, "single-line JSON");
  backend_flags.attach(compile, false);

  auto* validate_cmd = app.add_subcommand("validate", "check dependency placement");
  validate_cmd->add_option("expression", expression, "query expression");
  validate_cmd->add_option("--ast", ast_file, "AST JSON file")->check(CLI::ExistingFile);
  validate_cmd->add_flag("--strict", strict, "warn about repeated or blank placeholder names");

  auto* tree = app.add_subcommand("tree", "print the AST as an indented tree");
  tree->add_option("expression", expression, "query expression")->required();

  auto* run = app.add_subcommand("run", "answer a question");
  run->add_option("question", run_flags.question, "the question")->required();
  run->add_option("--expression", run_flags.expression, "skip translation and execute this expression");
  run->add_option("--trace", run_flags.trace, "write the execution trace as JSON");
  run->add_flag("--timings", run_flags.timings, "include wall times in the trace");
  backend_flags.attach(run, true);

  auto* eval = app.add_subcommand("eval", "score a JSON lines dataset {id, question, golds[, expression]}");
  eval->add_option("dataset", dataset, "dataset file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out_path, "also write the report here");
  backend_flags.attach(eval, true);

  auto* gen = app.add_subcommand("gen-data", "build {query, expression} training pairs");
  gen->add_option("questions", dataset, "one question per line")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_path, "JSON lines output")->required();
  backend_flags.attach(gen, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSyntax;
  }

  try {
    if (*compile) return cmd_compile(expression, from_query, compact, backend_flags);
    if (*validate_cmd) return cmd_validate(expression, ast_file, strict);
    if (*tree) {
      std::cout << render_tree(parse(expression));
      return kOk;
    }
    if (*run) return cmd_run(run_flags, backend_flags);
    if (*eval) return cmd_eval(dataset, out_path, backend_flags);
    if (*gen) return cmd_gen_data(dataset, out_path, backend_flags);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSyntax;
  } catch (const CompileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSyntax;
  } catch (const SchemaViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSyntax;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const NoValidExpression& e) {
    print_rejections(e.rejected());
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ExecutionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ExecutionErrc::UnboundPlaceholder ? kInvalid : kConfig;
  } catch (const std::exception& e) {
    // ConfigError, TransportError, ResponseFormatError, unreadable files.
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
