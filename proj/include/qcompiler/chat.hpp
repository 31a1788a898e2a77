#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qcompiler {

struct Message {
  std::string role;
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct ChatRequest {
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_tokens = 512;
  /// Zero means the client's configured timeout.
  std::chrono::milliseconds timeout{0};
};

/// Network or HTTP-status failure talking to a backend service.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The service answered, but not with the expected payload shape.
class ResponseFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Anything that turns a message list into one completion.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct EndpointConfig {
  /// Full URL including path, e.g. http://localhost:8000/v1/chat/completions
  std::string url;
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60'000};
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/'
};

/// Splits an http(s) URL; throws std::invalid_argument when malformed.
ParsedUrl split_url(const std::string& url);

/// Chat-completion request body: {model, messages, temperature, max_tokens}.
nlohmann::json chat_request_body(const std::string& model, const ChatRequest& request);

/// Pulls choices[0].message.content out of a response body.
/// Throws ResponseFormatError.
std::string chat_response_content(const std::string& body);

/// Chat-completion client over HTTP(S). Safe for concurrent use: each call
/// opens its own connection.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config);

  std::string complete(const ChatRequest& request) override;

  const EndpointConfig& config() const noexcept { return config_; }

 private:
  EndpointConfig config_;
  ParsedUrl url_;
};

}  // namespace qcompiler
