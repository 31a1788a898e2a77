#pragma once

#include <chrono>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/executor.hpp"

namespace qcompiler {

/// Case-folded alphanumeric runs.
std::vector<std::string> lexical_tokens(std::string_view text);

/// In-memory keyword index. Each distinct query token scores 2 when it occurs
/// in the title, otherwise 1 when it occurs in the content; ties go to the
/// smaller id.
class LexicalIndex : public Retriever {
 public:
  /// Throws std::invalid_argument on an empty corpus or duplicate ids.
  explicit LexicalIndex(std::vector<Document> documents);

  std::vector<Document> retrieve(std::string_view query, std::size_t k) override;

  double score(std::string_view query, std::size_t doc_index) const;
  const std::vector<Document>& documents() const noexcept { return documents_; }

 private:
  struct Entry {
    std::set<std::string> title;
    std::set<std::string> content;
  };

  std::vector<Document> documents_;
  std::vector<Entry> entries_;
};

/// Reads JSON lines {"id", "title", "content"}; blank lines are skipped.
std::vector<Document> load_corpus(const std::filesystem::path& path);

/// Remote retriever: POST {query, k} -> {documents: [{id, title, content, score}]}.
class HttpRetriever : public Retriever {
 public:
  HttpRetriever(std::string url, std::chrono::milliseconds timeout = std::chrono::milliseconds{60'000});
  std::vector<Document> retrieve(std::string_view query, std::size_t k) override;

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace qcompiler
