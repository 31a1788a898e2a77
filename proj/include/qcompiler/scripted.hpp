#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcompiler/chat.hpp"
#include "qcompiler/executor.hpp"

namespace qcompiler {

/// Offline chat backend that answers from a script instead of a model.
///
/// Rules are tried in order against the content of the last message; the
/// first rule whose `match` substring occurs wins. A rule with several
/// replies serves them in sequence and then repeats the last one. Unmatched
/// prompts get `fallback` ("UNKNOWN" unless set).
///
/// Script file: {"default": "...", "rules": [{"match": "...", "reply": "..."}
///                                           | {"match": "...", "replies": [...]}]}
class ScriptedBackend : public ChatClient, public Generator {
 public:
  struct Rule {
    std::string match;
    std::vector<std::string> replies;
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Rule> rules, std::string fallback = "UNKNOWN");

  /// Throws std::invalid_argument on a malformed script.
  explicit ScriptedBackend(const nlohmann::json& script);
  explicit ScriptedBackend(const std::filesystem::path& script_file);

  std::string complete(const ChatRequest& request) override;
  std::string generate(const std::vector<Message>& messages) override;

  /// Every request seen so far, in arrival order.
  std::vector<std::vector<Message>> calls() const;
  std::size_t call_count() const;

 private:
  std::string reply_for(const std::vector<Message>& messages);

  std::vector<Rule> rules_;
  std::vector<std::size_t> served_;
  std::string fallback_ = "UNKNOWN";
  mutable std::mutex mutex_;
  std::vector<std::vector<Message>> calls_;
};

}  // namespace qcompiler
