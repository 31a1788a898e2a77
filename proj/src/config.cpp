#include "qcompiler/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qcompiler {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json* field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

const json& object_at(const json& obj, const char* key) {
  const auto* v = field(obj, key);
  require(v->is_object(), std::string{"\""} + key + "\" must be an object");
  return *v;
}

std::string string_at(const json& obj, const char* key) {
  const auto* v = field(obj, key);
  require(v->is_string(), std::string{"\""} + key + "\" must be a string");
  return v->get<std::string>();
}

std::size_t count_at(const json& obj, const char* key) {
  const auto* v = field(obj, key);
  require(v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0),
          std::string{"\""} + key + "\" must be a non-negative integer");
  return v->get<std::size_t>();
}

std::chrono::milliseconds seconds_at(const json& obj, const char* key) {
  const auto* v = field(obj, key);
  require(v->is_number() && std::isfinite(v->get<double>()) && v->get<double>() > 0.0,
          std::string{"\""} + key + "\" must be a positive number of seconds");
  return std::chrono::milliseconds{static_cast<std::int64_t>(std::llround(v->get<double>() * 1000.0))};
}

fs::path resolve(const fs::path& base_dir, const std::string& value) {
  fs::path p{value};
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

}  // namespace

EndpointConfig Config::translator_endpoint() const { return {chat_endpoint, translator_model, api_key, timeout}; }

EndpointConfig Config::generator_endpoint() const { return {chat_endpoint, generator_model, api_key, timeout}; }

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v && *v) return std::string{v};
  return std::nullopt;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Config config_from_json(const json& doc, const fs::path& base_dir) {
  require(doc.is_object(), "top level must be an object");
  Config config;
  if (field(doc, "endpoints")) {
    const auto& endpoints = object_at(doc, "endpoints");
    if (field(endpoints, "chat")) config.chat_endpoint = string_at(endpoints, "chat");
    if (field(endpoints, "retriever")) config.retriever_endpoint = string_at(endpoints, "retriever");
  }
  if (field(doc, "models")) {
    const auto& models = object_at(doc, "models");
    if (field(models, "translator")) config.translator_model = string_at(models, "translator");
    if (field(models, "generator")) config.generator_model = string_at(models, "generator");
  }
  if (field(doc, "api_key")) config.api_key = string_at(doc, "api_key");
  if (field(doc, "k")) {
    config.top_k = count_at(doc, "k");
    require(config.top_k > 0, "\"k\" must be at least 1");
  }
  if (field(doc, "parallelism")) {
    config.parallelism = count_at(doc, "parallelism");
    require(config.parallelism > 0, "\"parallelism\" must be at least 1");
  }
  if (field(doc, "timeout_seconds")) config.timeout = seconds_at(doc, "timeout_seconds");

  if (field(doc, "schedule")) {
    const auto& s = object_at(doc, "schedule");
    if (const auto* temps = field(s, "temperatures")) {
      require(temps->is_array(), "\"temperatures\" must be an array");
      config.schedule.temperatures.clear();
      for (const auto& t : *temps) {
        require(t.is_number(), "\"temperatures\" must hold numbers");
        config.schedule.temperatures.push_back(t.get<double>());
      }
    }
    if (field(s, "attempts_per_temperature")) {
      config.schedule.attempts_per_temperature = count_at(s, "attempts_per_temperature");
    }
    if (field(s, "request_timeout_seconds")) config.schedule.request_timeout = seconds_at(s, "request_timeout_seconds");
    try {
      config.schedule.check();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string{"config: "} + e.what());
    }
  }

  if (field(doc, "prompts")) {
    const auto& prompts = object_at(doc, "prompts");
    const std::pair<const char*, std::string*> slots[] = {
        {"translator_system", &config.prompts.translator_system},
        {"training_data", &config.prompts.training_data},
        {"leaf_answer", &config.prompts.leaf_answer},
        {"binding_extraction", &config.prompts.binding_extraction},
        {"synthesis", &config.prompts.synthesis},
    };
    for (const auto& [key, value] : prompts.items()) {
      const auto slot = std::find_if(std::begin(slots), std::end(slots), [&](const auto& s) { return key == s.first; });
      require(slot != std::end(slots), "unknown prompt \"" + key + "\"");
      require(value.is_string(), "prompt \"" + key + "\" must be a path");
      *slot->second = read_text_file(resolve(base_dir, value.get<std::string>()));
    }
  }
  if (field(doc, "corpus")) config.corpus = resolve(base_dir, string_at(doc, "corpus"));
  if (field(doc, "script")) config.script = resolve(base_dir, string_at(doc, "script"));
  return config;
}

void apply_env(Config& config, const EnvLookup& env) {
  if (auto v = env("QC_ENDPOINT")) config.chat_endpoint = *v;
  if (auto v = env("QC_MODEL")) {
    config.translator_model = *v;
    config.generator_model = *v;
  }
  if (auto v = env("QC_API_KEY")) config.api_key = *v;
}

Config load_config(const std::optional<fs::path>& path, const EnvLookup& env) {
  Config config = path ? config_from_json(read_json_file(*path), path->parent_path()) : Config{};
  apply_env(config, env);
  return config;
}

}  // namespace qcompiler
