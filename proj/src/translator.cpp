#include "qcompiler/translator.hpp"

#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcompiler/parser.hpp"

namespace qcompiler {

void SamplingSchedule::check() const {
  if (temperatures.empty()) throw std::invalid_argument("sampling schedule has no temperatures");
  for (double t : temperatures) {
    if (!(t >= 0.0)) throw std::invalid_argument("sampling temperatures must be non-negative");
  }
  if (attempts_per_temperature == 0) throw std::invalid_argument("attempts_per_temperature must be positive");
  if (total_attempts() > kMaxScheduleAttempts) {
    throw std::invalid_argument("sampling schedule allows at most " + std::to_string(kMaxScheduleAttempts) +
                                " attempts, got " + std::to_string(total_attempts()));
  }
}

std::string describe(const RejectionReason& reason) {
  if (const auto* err = std::get_if<CompileError>(&reason)) return err->what();
  const auto& report = std::get<ValidationReport>(reason);
  std::string out;
  for (const auto& v : report.violations) {
    if (!out.empty()) out += "; ";
    out += std::string{to_string(v.kind)} + " at " + format_path(v.node_path);
  }
  return out;
}

NoValidExpression::NoValidExpression(std::vector<Rejection> rejected)
    : std::runtime_error("no valid expression after " + std::to_string(rejected.size()) + " attempts"),
      rejected_(std::move(rejected)) {}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string_view strip_backticks(std::string_view line) {
  line = trim(line);
  while (line.size() >= 2 && line.front() == '`' && line.back() == '`') {
    line = trim(line.substr(1, line.size() - 2));
  }
  return line;
}

}  // namespace

std::string clean_completion(std::string_view completion) {
  std::string_view last;
  for (auto line : split_lines(completion)) {
    const auto t = trim(line);
    if (t.empty() || t.starts_with("```")) continue;
    last = t;
  }
  return std::string{strip_backticks(last)};
}

std::optional<std::string> extract_compiled_expression(std::string_view completion) {
  constexpr std::string_view kMarker = "compiled_expression";
  const auto lines = split_lines(completion);
  for (std::size_t i = lines.size(); i-- > 0;) {
    const auto line = lines[i];
    const auto at = line.rfind(kMarker);
    if (at == std::string_view::npos) continue;
    auto rest = trim(line.substr(at + kMarker.size()));
    if (!rest.starts_with('=')) continue;
    rest = strip_backticks(rest.substr(1));
    if (!rest.empty()) return std::string{rest};
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto next = trim(lines[j]);
      if (next.empty() || next.starts_with("```")) continue;
      return std::string{strip_backticks(next)};
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::ExtractionFailed: return "ExtractionFailed";
    case DropReason::ParseError: return "ParseError";
    case DropReason::InvalidExpression: return "InvalidExpression";
    case DropReason::TransportError: return "TransportError";
    case DropReason::ResponseFormatError: return "ResponseFormatError";
  }
  return "?";
}

Translator::Translator(ChatClient& client, PromptSet prompts) : client_(client), prompts_(std::move(prompts)) {}

std::string Translator::complete_with_retry(const ChatRequest& request) const {
  try {
    return client_.complete(request);
  } catch (const TransportError&) {
    return client_.complete(request);
  }
}

TranslationResult Translator::translate(std::string_view query, const SamplingSchedule& schedule) const {
  schedule.check();
  std::vector<Rejection> rejected;
  std::size_t attempts = 0;
  for (double temperature : schedule.temperatures) {
    for (std::size_t n = 0; n < schedule.attempts_per_temperature; ++n) {
      ChatRequest request;
      request.messages = {{"system", prompts_.translator_system}, {"user", std::string{query}}};
      request.temperature = temperature;
      request.max_tokens = 256;
      request.timeout = schedule.request_timeout;
      ++attempts;
      auto expression = clean_completion(complete_with_retry(request));
      try {
        auto ast = parse(expression);
        auto report = validate(ast);
        if (report.valid) {
          return {std::move(expression), std::move(ast), attempts, std::move(rejected)};
        }
        rejected.push_back({std::move(expression), std::move(report)});
      } catch (const CompileError& e) {
        rejected.push_back({std::move(expression), e});
      }
    }
  }
  throw NoValidExpression(std::move(rejected));
}

DatasetReport Translator::build_training_pairs(std::span<const std::string> questions,
                                               const SamplingSchedule& schedule, std::ostream& out) const {
  schedule.check();
  DatasetReport report;
  for (const auto& question : questions) {
    std::optional<std::string> kept;
    DroppedQuestion drop{question, DropReason::ExtractionFailed, {}};
    for (double temperature : schedule.temperatures) {
      for (std::size_t n = 0; n < schedule.attempts_per_temperature && !kept; ++n) {
        ChatRequest request;
        request.messages = {{"system", prompts_.training_data}, {"user", "query = " + question}};
        request.temperature = temperature;
        request.max_tokens = 1024;
        request.timeout = schedule.request_timeout;
        std::string completion;
        try {
          completion = complete_with_retry(request);
        } catch (const TransportError& e) {
          drop = {question, DropReason::TransportError, e.what()};
          continue;
        } catch (const ResponseFormatError& e) {
          drop = {question, DropReason::ResponseFormatError, e.what()};
          continue;
        }
        auto expression = extract_compiled_expression(completion);
        if (!expression) {
          drop = {question, DropReason::ExtractionFailed, "no \"compiled_expression =\" line"};
          continue;
        }
        try {
          const auto verdict = validate(parse(*expression));
          if (verdict.valid) {
            kept = std::move(*expression);
          } else {
            drop = {question, DropReason::InvalidExpression, describe(RejectionReason{verdict})};
          }
        } catch (const CompileError& e) {
          drop = {question, DropReason::ParseError, e.what()};
        }
      }
      if (kept) break;
    }
    if (kept) {
      nlohmann::ordered_json record;
      record["query"] = question;
      record["expression"] = *kept;
      out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
      ++report.kept;
    } else {
      ++report.dropped;
      report.drops.push_back(std::move(drop));
    }
  }
  return report;
}

}  // namespace qcompiler
