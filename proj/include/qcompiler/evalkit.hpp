#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qcompiler {

struct TokenCounts {
  std::int64_t prompt = 0;
  std::int64_t documents = 0;
  std::int64_t response = 0;

  std::int64_t total() const { return prompt + documents + response; }

  TokenCounts& operator+=(const TokenCounts& other) {
    prompt += other.prompt;
    documents += other.documents;
    response += other.response;
    return *this;
  }
  friend TokenCounts operator+(TokenCounts a, const TokenCounts& b) { return a += b; }
  friend bool operator==(const TokenCounts&, const TokenCounts&) = default;
};

/// Pluggable tokenizer for token accounting.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::int64_t count(std::string_view text) const = 0;
};

/// Alphanumeric runs plus one per punctuation mark. Bytes >= 0x80 are treated
/// as word characters so UTF-8 words count once.
class HeuristicTokenCounter : public TokenCounter {
 public:
  std::int64_t count(std::string_view text) const override;
};

const TokenCounter& default_token_counter();

inline std::int64_t count_tokens(std::string_view text) { return default_token_counter().count(text); }

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace.
std::string normalize_answer(std::string_view text);

/// Splits a printed ground truth such as "for the conclave in Rome; Rome; Roma"
/// into trimmed, non-empty aliases.
std::vector<std::string> split_aliases(std::string_view gold);

/// 1 iff the normalized prediction equals some normalized gold.
int exact_match(std::string_view prediction, std::span<const std::string> golds);

/// 1 iff some normalized gold occurs in the normalized prediction. A gold that
/// normalizes to nothing only matches an equally empty prediction.
int accuracy(std::string_view prediction, std::span<const std::string> golds);

/// Token-overlap F1, maximised over golds. Two empty sides score 1.
double f1_score(std::string_view prediction, std::span<const std::string> golds);

struct MetricRow {
  std::string question_id;
  int em = 0;
  int acc = 0;
  double f1 = 0.0;
  std::int64_t tokens = 0;
};

MetricRow score_prediction(std::string question_id, std::string_view prediction,
                           std::span<const std::string> golds, std::int64_t tokens = 0);

struct RunReport {
  std::size_t count = 0;
  double em = 0.0;   // percent, one decimal
  double acc = 0.0;
  double f1 = 0.0;
  double tokens_per_query = 0.0;
};

RunReport aggregate_run(std::span<const MetricRow> rows);

/// One-decimal rendering, e.g. 66.7.
std::string format_percent(double value);

nlohmann::ordered_json run_report_to_json(const RunReport& report, std::span<const MetricRow> rows);

}  // namespace qcompiler
