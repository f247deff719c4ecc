#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace flowagent::agent {

struct ChatMessage {
  std::string role;  // "system", "user", "assistant"
  std::string content;
};

struct CompletionParams {
  double temperature = 0.2;
  int max_tokens = 1024;
};

// Network failure, timeout, malformed reply, or an exhausted script.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages,
                               const CompletionParams& params) = 0;
  virtual std::string identity() const = 0;

  std::string complete_prompt(const std::string& prompt, const CompletionParams& params = {}) {
    return complete({{"user", prompt}}, params);
  }
};

// Replays a fixed list of completions in order. Thread-safe.
class ScriptedBackend : public LlmBackend {
 public:
  enum class OnExhausted { Error, RepeatLast, Cycle };

  // An entry {"error": "..."} makes that call throw BackendError.
  struct Entry {
    std::string text;
    bool error = false;
  };

  explicit ScriptedBackend(std::vector<Entry> entries, OnExhausted on_exhausted = OnExhausted::Error,
                           std::string identity = "scripted");
  static std::shared_ptr<ScriptedBackend> from_strings(std::vector<std::string> texts,
                                                       OnExhausted on_exhausted = OnExhausted::Error,
                                                       std::string identity = "scripted");
  // Either an array of entries or {"responses": [...], "on_exhausted": "error|repeat_last|cycle",
  // "identity": "..."}; entries are strings or {"error": "..."}.
  static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& json);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  std::string complete(const std::vector<ChatMessage>& messages,
                       const CompletionParams& params) override;
  std::string identity() const override { return identity_; }

  std::size_t calls() const;
  std::vector<std::string> prompts() const;  // last message content of each call

 private:
  std::vector<Entry> entries_;
  OnExhausted on_exhausted_;
  std::string identity_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
};

// Adapts a callable; used by oracle judges and tests.
class FunctionBackend : public LlmBackend {
 public:
  using Fn = std::function<std::string(const std::vector<ChatMessage>&, const CompletionParams&)>;
  FunctionBackend(Fn fn, std::string identity) : fn_(std::move(fn)), identity_(std::move(identity)) {}

  std::string complete(const std::vector<ChatMessage>& messages,
                       const CompletionParams& params) override {
    return fn_(messages, params);
  }
  std::string identity() const override { return identity_; }

 private:
  Fn fn_;
  std::string identity_;
};

// OpenAI-compatible /chat/completions client.
struct OpenAiConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4o-2024-05-13";
  int timeout_seconds = 60;

  // OPENAI_BASE_URL, OPENAI_API_KEY, OPENAI_MODEL override the defaults.
  static OpenAiConfig from_env();
};

class OpenAiBackend : public LlmBackend {
 public:
  explicit OpenAiBackend(OpenAiConfig config);

  std::string complete(const std::vector<ChatMessage>& messages,
                       const CompletionParams& params) override;
  std::string identity() const override { return "openai:" + config_.model; }

  // Request body for the chat-completions endpoint.
  static nlohmann::json request_body(const std::string& model, const std::vector<ChatMessage>& messages,
                                     const CompletionParams& params);
  // Extracts choices[0].message.content; throws BackendError.
  static std::string parse_response(const std::string& body);

 private:
  OpenAiConfig config_;
};

}  // namespace flowagent::agent
