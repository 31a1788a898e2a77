#include "qcompiler/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "qcompiler/surface.hpp"

namespace qcompiler {

namespace {

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }
bool is_punct_byte(unsigned char c) { return c < 0x80 && std::ispunct(c); }

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_space(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double f1_tokens(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
  std::map<std::string, int> remaining;
  for (const auto& t : gold) ++remaining[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = remaining.find(t);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

std::int64_t HeuristicTokenCounter::count(std::string_view text) const {
  std::int64_t n = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      if (!in_word) ++n;
      in_word = true;
      continue;
    }
    in_word = false;
    if (is_punct_byte(c)) ++n;
  }
  return n;
}

const TokenCounter& default_token_counter() {
  static const HeuristicTokenCounter counter;
  return counter;
}

std::string normalize_answer(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_punct_byte(c)) continue;
    stripped.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  std::string out;
  for (auto& word : split_ws(stripped)) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::vector<std::string> split_aliases(std::string_view gold) {
  std::vector<std::string> aliases;
  std::size_t start = 0;
  while (start <= gold.size()) {
    auto end = gold.find(';', start);
    if (end == std::string_view::npos) end = gold.size();
    const auto alias = trim(gold.substr(start, end - start));
    if (!alias.empty()) aliases.emplace_back(alias);
    start = end + 1;
  }
  return aliases;
}

int exact_match(std::string_view prediction, std::span<const std::string> golds) {
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds) {
    if (normalize_answer(g) == pred) return 1;
  }
  return 0;
}

int accuracy(std::string_view prediction, std::span<const std::string> golds) {
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds) {
    const auto gold = normalize_answer(g);
    if (gold.empty() ? pred.empty() : pred.find(gold) != std::string::npos) return 1;
  }
  return 0;
}

double f1_score(std::string_view prediction, std::span<const std::string> golds) {
  const auto pred = split_ws(normalize_answer(prediction));
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, f1_tokens(pred, split_ws(normalize_answer(g))));
  return best;
}

MetricRow score_prediction(std::string question_id, std::string_view prediction,
                           std::span<const std::string> golds, std::int64_t tokens) {
  return {std::move(question_id), exact_match(prediction, golds), accuracy(prediction, golds),
          f1_score(prediction, golds), tokens};
}

RunReport aggregate_run(std::span<const MetricRow> rows) {
  RunReport report;
  report.count = rows.size();
  if (rows.empty()) return report;
  double em = 0, acc = 0, f1 = 0, tokens = 0;
  for (const auto& r : rows) {
    em += r.em;
    acc += r.acc;
    f1 += r.f1;
    tokens += static_cast<double>(r.tokens);
  }
  const auto n = static_cast<double>(rows.size());
  report.em = round1(100.0 * em / n);
  report.acc = round1(100.0 * acc / n);
  report.f1 = round1(100.0 * f1 / n);
  report.tokens_per_query = round1(tokens / n);
  return report;
}

std::string format_percent(double value) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << value;
  return out.str();
}

nlohmann::ordered_json run_report_to_json(const RunReport& report, std::span<const MetricRow> rows) {
  nlohmann::ordered_json doc;
  doc["count"] = report.count;
  doc["em"] = report.em;
  doc["acc"] = report.acc;
  doc["f1"] = report.f1;
  doc["tokens_per_query"] = report.tokens_per_query;
  auto items = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json item;
    item["id"] = r.question_id;
    item["em"] = r.em;
    item["acc"] = r.acc;
    item["f1"] = r.f1;
    item["tokens"] = r.tokens;
    items.push_back(std::move(item));
  }
  doc["rows"] = std::move(items);
  return doc;
}

}  // namespace qcompiler
