#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "flowagent/agent/backend.hpp"
#include "flowagent/agent/runtime.hpp"
#include "flowagent/control/controllers.hpp"

namespace flowagent::service {

// Partial controller settings layered over an agent kind's defaults.
struct ControllerOverrides {
  std::optional<std::set<std::string>> pre;
  std::optional<std::set<std::string>> post;
  std::optional<int> max_identical_api_calls;
  std::optional<int> max_total_turns;
  std::optional<int> max_policy_retries_per_turn;
  std::optional<int> max_tool_calls_per_turn;

  void apply(control::ControllerConfig& cfg) const;
  bool empty() const;
};

// {"pre": [...], "post": [...], "max_total_turns": N, ...}; throws on unknown keys.
ControllerOverrides controller_overrides_from_json(const nlohmann::json& j);
nlohmann::json to_json(const control::ControllerConfig& cfg);

// Plain `key = value` file; '#' starts a comment line. Relative paths are
// resolved against the file's directory. Credentials come from the
// environment only (OPENAI_API_KEY).
//
//   agent.kind          flowagent | react-nl | react-code | react-fc
//   agent.backend       scripted:<file> | openai | echo
//   agent.classifier    template | none
//   user.backend        scripted:<file> | openai
//   user.profile        profile file (.json or markdown)
//   judge.turn          exact | scripted:<file> | openai
//   judge.session       mechanical | scripted:<file> | openai
//   tools               tool fixture JSON; empty payload stubs when unset
//   controllers.pre / controllers.post   comma-separated ids, "none" for empty
//   controllers.max_identical_api_calls, controllers.max_total_turns,
//   controllers.max_policy_retries_per_turn, controllers.max_tool_calls_per_turn
//   runtime.temperature, runtime.max_tokens, runtime.current_time,
//   runtime.fallback_text, runtime.closing_text
//   simulate.hard_turn_cap
//   openai.base_url, openai.model, openai.timeout_seconds
struct ServiceConfig {
  std::string agent_kind = "flowagent";
  std::string agent_backend;
  std::string agent_classifier = "template";
  std::string user_backend;
  std::string user_profile;
  std::string judge_turn = "exact";
  std::string judge_session = "mechanical";
  std::string tools;
  ControllerOverrides controllers;
  agent::RuntimeConfig runtime;
  std::optional<std::string> current_time;
  int hard_turn_cap = 50;
  agent::OpenAiConfig openai = agent::OpenAiConfig::from_env();
  std::filesystem::path base_dir = ".";

  // Sets one key; throws std::invalid_argument for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  std::filesystem::path resolve(const std::string& path) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ConfigError with the line number.
ServiceConfig parse_config(std::string_view text, std::filesystem::path base_dir = ".");
ServiceConfig load_config(const std::filesystem::path& path);

}  // namespace flowagent::service
