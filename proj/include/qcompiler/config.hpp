#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qcompiler/chat.hpp"
#include "qcompiler/prompts.hpp"
#include "qcompiler/translator.hpp"

namespace qcompiler {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON document:
///
///   {
///     "endpoints": {"chat": URL, "retriever": URL},
///     "models": {"translator": NAME, "generator": NAME},
///     "api_key": TOKEN,
///     "k": 3, "parallelism": 1, "timeout_seconds": 60,
///     "schedule": {"temperatures": [...], "attempts_per_temperature": 2,
///                  "request_timeout_seconds": 60},
///     "prompts": {"translator_system"|"training_data"|"leaf_answer"|
///                 "binding_extraction"|"synthesis": PATH},
///     "corpus": PATH, "script": PATH
///   }
///
/// Every field is optional. Relative paths resolve against the config file's
/// directory. QC_ENDPOINT, QC_MODEL and QC_API_KEY override the file.
struct Config {
  std::string chat_endpoint;
  std::string retriever_endpoint;
  std::string translator_model;
  std::string generator_model;
  std::string api_key;
  std::size_t top_k = 3;
  std::size_t parallelism = 1;
  std::chrono::milliseconds timeout{60'000};
  SamplingSchedule schedule;
  PromptSet prompts;
  std::filesystem::path corpus;
  std::filesystem::path script;

  EndpointConfig translator_endpoint() const;
  EndpointConfig generator_endpoint() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Throws ConfigError on malformed JSON, wrong field types or unreadable files.
Config config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env = process_env);
void apply_env(Config& config, const EnvLookup& env);

nlohmann::json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qcompiler
