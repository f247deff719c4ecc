#include <httplib.h>

#include <cstdlib>

#include "flowagent/agent/backend.hpp"

namespace flowagent::agent {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? std::string(value) : std::move(fallback);
}

}  // namespace

OpenAiConfig OpenAiConfig::from_env() {
  OpenAiConfig cfg;
  cfg.base_url = env_or("OPENAI_BASE_URL", cfg.base_url);
  cfg.api_key = env_or("OPENAI_API_KEY", "");
  cfg.model = env_or("OPENAI_MODEL", cfg.model);
  return cfg;
}

OpenAiBackend::OpenAiBackend(OpenAiConfig config) : config_(std::move(config)) {}

nlohmann::json OpenAiBackend::request_body(const std::string& model,
                                           const std::vector<ChatMessage>& messages,
                                           const CompletionParams& params) {
  nlohmann::json body;
  body["model"] = model;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  return body;
}

std::string OpenAiBackend::parse_response(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (j.contains("error")) throw BackendError("backend error: " + j.at("error").dump());
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") + e.what());
  }
}

std::string OpenAiBackend::complete(const std::vector<ChatMessage>& messages,
                                    const CompletionParams& params) {
  // base_url is "scheme://host[:port][/prefix]"
  const auto scheme_end = config_.base_url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = config_.base_url.find('/', host_start);
  const std::string origin = config_.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(prefix + "/chat/completions", headers,
                         request_body(config_.model, messages, params).dump(), "application/json");
  if (!res) throw BackendError("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  }
  return parse_response(res->body);
}

}  // namespace flowagent::agent
