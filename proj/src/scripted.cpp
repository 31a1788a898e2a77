#include "qcompiler/scripted.hpp"

#include <fstream>
#include <stdexcept>

namespace qcompiler {

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::string fallback)
    : rules_(std::move(rules)), served_(rules_.size(), 0), fallback_(std::move(fallback)) {
  for (const auto& rule : rules_) {
    if (rule.replies.empty()) throw std::invalid_argument("script rule '" + rule.match + "' has no reply");
  }
}

namespace {

std::vector<ScriptedBackend::Rule> rules_from(const nlohmann::json& script) {
  if (!script.is_object()) throw std::invalid_argument("script must be a JSON object");
  std::vector<ScriptedBackend::Rule> rules;
  if (!script.contains("rules")) return rules;
  for (const auto& r : script.at("rules")) {
    if (!r.is_object() || !r.contains("match") || !r["match"].is_string()) {
      throw std::invalid_argument("script rule needs a string \"match\"");
    }
    ScriptedBackend::Rule rule{r["match"].get<std::string>(), {}};
    if (r.contains("reply")) rule.replies.push_back(r["reply"].get<std::string>());
    if (r.contains("replies")) {
      for (const auto& reply : r["replies"]) rule.replies.push_back(reply.get<std::string>());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

nlohmann::json read_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open script " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace

ScriptedBackend::ScriptedBackend(const nlohmann::json& script)
    : ScriptedBackend(rules_from(script), script.is_object() ? script.value("default", std::string{"UNKNOWN"})
                                                             : std::string{"UNKNOWN"}) {}

ScriptedBackend::ScriptedBackend(const std::filesystem::path& script_file)
    : ScriptedBackend(read_script(script_file)) {}

std::string ScriptedBackend::complete(const ChatRequest& request) { return reply_for(request.messages); }

std::string ScriptedBackend::generate(const std::vector<Message>& messages) { return reply_for(messages); }

std::string ScriptedBackend::reply_for(const std::vector<Message>& messages) {
  std::lock_guard lock(mutex_);
  calls_.push_back(messages);
  const std::string_view prompt = messages.empty() ? std::string_view{} : messages.back().content;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (prompt.find(rules_[i].match) == std::string_view::npos) continue;
    const auto& replies = rules_[i].replies;
    const auto index = std::min(served_[i], replies.size() - 1);
    ++served_[i];
    return replies[index];
  }
  return fallback_;
}

std::vector<std::vector<Message>> ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

}  // namespace qcompiler
