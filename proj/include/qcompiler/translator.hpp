#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcompiler/ast.hpp"
#include "qcompiler/chat.hpp"
#include "qcompiler/errors.hpp"
#include "qcompiler/prompts.hpp"
#include "qcompiler/validator.hpp"

namespace qcompiler {

inline constexpr std::size_t kMaxScheduleAttempts = 32;

struct SamplingSchedule {
  std::vector<double> temperatures{0.0, 0.3, 0.7, 1.0};
  std::size_t attempts_per_temperature = 2;
  std::chrono::milliseconds request_timeout{60'000};

  std::size_t total_attempts() const { return temperatures.size() * attempts_per_temperature; }

  /// Throws std::invalid_argument unless temperatures are non-empty and
  /// non-negative and 1 <= total attempts <= 32.
  void check() const;
};

/// Why a candidate expression was discarded.
using RejectionReason = std::variant<CompileError, ValidationReport>;

struct Rejection {
  std::string expression;
  RejectionReason reason;
};

std::string describe(const RejectionReason& reason);

struct TranslationResult {
  std::string expression;
  QueryNode ast;
  std::size_t attempts_used = 0;
  std::vector<Rejection> rejected;
};

class NoValidExpression : public std::runtime_error {
 public:
  explicit NoValidExpression(std::vector<Rejection> rejected);
  const std::vector<Rejection>& rejected() const noexcept { return rejected_; }

 private:
  std::vector<Rejection> rejected_;
};

/// Strips markdown code fences and returns the last non-empty line, trimmed.
std::string clean_completion(std::string_view completion);

/// Text after the last "compiled_expression =" marker (or the next non-empty
/// line when the marker ends its line), cleaned. nullopt without a marker.
std::optional<std::string> extract_compiled_expression(std::string_view completion);

enum class DropReason { ExtractionFailed, ParseError, InvalidExpression, TransportError, ResponseFormatError };

std::string_view to_string(DropReason reason);

struct DroppedQuestion {
  std::string question;
  DropReason reason;
  std::string detail;
};

struct DatasetReport {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::vector<DroppedQuestion> drops;
};

/// Client side of the query expression translator.
class Translator {
 public:
  explicit Translator(ChatClient& client, PromptSet prompts = {});

  /// Samples the schedule in order (temperature-major) and returns the first
  /// completion that parses and validates. A transport failure is retried
  /// once per attempt before propagating. Throws NoValidExpression when the
  /// schedule is exhausted.
  TranslationResult translate(std::string_view query, const SamplingSchedule& schedule = {}) const;

  /// Chain-of-thought sampling for each question; writes one JSON line
  /// {"query", "expression"} per question with a valid expression and skips
  /// the rest.
  DatasetReport build_training_pairs(std::span<const std::string> questions,
                                     const SamplingSchedule& schedule, std::ostream& out) const;

 private:
  std::string complete_with_retry(const ChatRequest& request) const;

  ChatClient& client_;
  PromptSet prompts_;
};

}  // namespace qcompiler
