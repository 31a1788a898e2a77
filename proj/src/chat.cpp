#include "qcompiler/chat.hpp"

#include <stdexcept>

#include <httplib.h>

namespace qcompiler {

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL has no scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported URL scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.origin = url.substr(0, path_begin);
  parsed.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (parsed.origin.size() == scheme_end + 3) throw std::invalid_argument("URL has no host: " + url);
  return parsed;
}

nlohmann::json chat_request_body(const std::string& model, const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", model},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string chat_response_content(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ResponseFormatError("chat response is not JSON");
  }
  const auto* choices = doc.is_object() && doc.contains("choices") ? &doc["choices"] : nullptr;
  if (!choices || !choices->is_array() || choices->empty()) {
    throw ResponseFormatError("chat response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw ResponseFormatError("chat response choice has no message");
  }
  const auto& message = first["message"];
  if (!message.contains("content") || !message["content"].is_string()) {
    throw ResponseFormatError("chat response message has no string content");
  }
  return message["content"].get<std::string>();
}

HttpChatClient::HttpChatClient(EndpointConfig config) : config_(std::move(config)) {
  try {
    url_ = split_url(config_.url);
  } catch (const std::invalid_argument& e) {
    throw TransportError(e.what());
  }
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  httplib::Client client(url_.origin);
  const auto timeout = request.timeout.count() > 0 ? request.timeout : config_.timeout;
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto body = chat_request_body(config_.model, request).dump();
  auto result = client.Post(url_.path, headers, body, "application/json");
  if (!result) {
    throw TransportError("chat request to " + config_.url + " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("chat request to " + config_.url + " returned HTTP " + std::to_string(result->status));
  }
  return chat_response_content(result->body);
}

}  // namespace qcompiler
