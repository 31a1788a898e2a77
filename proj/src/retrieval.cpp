#include "qcompiler/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace qcompiler {

std::vector<std::string> lexical_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

LexicalIndex::LexicalIndex(std::vector<Document> documents) : documents_(std::move(documents)) {
  if (documents_.empty()) throw std::invalid_argument("corpus is empty");
  std::unordered_set<std::string> ids;
  entries_.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (!ids.insert(doc.id).second) throw std::invalid_argument("duplicate document id: " + doc.id);
    Entry entry;
    for (auto& t : lexical_tokens(doc.title)) entry.title.insert(std::move(t));
    for (auto& t : lexical_tokens(doc.content)) entry.content.insert(std::move(t));
    entries_.push_back(std::move(entry));
  }
}

double LexicalIndex::score(std::string_view query, std::size_t doc_index) const {
  const auto& entry = entries_.at(doc_index);
  auto terms = lexical_tokens(query);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  double s = 0.0;
  for (const auto& t : terms) {
    if (entry.title.contains(t)) {
      s += 2.0;
    } else if (entry.content.contains(t)) {
      s += 1.0;
    }
  }
  return s;
}

std::vector<Document> LexicalIndex::retrieve(std::string_view query, std::size_t k) {
  std::vector<std::size_t> order(documents_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> scores(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) scores[i] = score(query, i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return documents_[a].id < documents_[b].id;
  });
  order.resize(std::min(k, order.size()));
  std::vector<Document> out;
  out.reserve(order.size());
  for (auto i : order) {
    out.push_back(documents_[i]);
    out.back().score = scores[i];
  }
  return out;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      docs.push_back({doc.at("id").get<std::string>(), doc.at("title").get<std::string>(),
                      doc.at("content").get<std::string>(), 0.0});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

HttpRetriever::HttpRetriever(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {}

std::vector<Document> HttpRetriever::retrieve(std::string_view query, std::size_t k) {
  ParsedUrl url;
  try {
    url = split_url(url_);
  } catch (const std::invalid_argument& e) {
    throw TransportError(e.what());
  }
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  const nlohmann::json body = {{"query", std::string{query}}, {"k", k}};
  auto result = client.Post(url.path, body.dump(), "application/json");
  if (!result) throw TransportError("retriever request failed: " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("retriever returned HTTP " + std::to_string(result->status));
  }
  std::vector<Document> docs;
  try {
    const auto doc = nlohmann::json::parse(result->body);
    for (const auto& d : doc.at("documents")) {
      const double score = d.at("score").get<double>();
      if (!std::isfinite(score)) throw ResponseFormatError("retriever returned a non-finite score");
      docs.push_back({d.at("id").get<std::string>(), d.at("title").get<std::string>(),
                      d.at("content").get<std::string>(), score});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ResponseFormatError(std::string{"malformed retriever response: "} + e.what());
  }
  if (docs.size() > k) docs.resize(k);
  return docs;
}

}  // namespace qcompiler
