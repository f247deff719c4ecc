#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"
#include "flowagent/agent/session.hpp"
#include "flowagent/pdl/graph.hpp"

namespace flowagent::control {

inline constexpr const char* kNodeDependency = "node_dependency";
inline constexpr const char* kApiRepetition = "api_repetition";
inline constexpr const char* kConversationLength = "conversation_length";

// Registration order; run_pre/run_post evaluate in this order.
const std::vector<std::string>& registered_controllers();

struct PreGuidance {
  std::string controller_id;
  std::string guidance_text;
  std::map<std::string, std::set<std::string>> blocked;  // node -> unmet preconditions

  bool operator==(const PreGuidance&) const = default;
};

enum class Decision { Allow, Deny };

struct ControllerVerdict {
  std::string controller_id;
  Decision decision = Decision::Allow;
  std::optional<std::string> feedback;  // always set on Deny

  bool allowed() const { return decision == Decision::Allow; }
  bool operator==(const ControllerVerdict&) const = default;
};

struct ControllerConfig {
  int max_identical_api_calls = 3;
  int max_total_turns = 20;
  int max_policy_retries_per_turn = 3;
  int max_tool_calls_per_turn = 5;
  std::set<std::string> enabled_pre{kNodeDependency};
  std::set<std::string> enabled_post{kNodeDependency, kApiRepetition, kConversationLength};

  // Throws std::invalid_argument for bounds < 1 or unknown controller ids.
  void check() const;

  static ControllerConfig all_enabled() { return {}; }
  static ControllerConfig all_disabled() {
    ControllerConfig cfg;
    cfg.enabled_pre.clear();
    cfg.enabled_post.clear();
    return cfg;
  }

  bool operator==(const ControllerConfig&) const = default;
};

PreGuidance pre_dependency(const agent::SessionState& state, const pdl::DependencyGraph& graph);

// Applies to ToolCalls and labeled BotResponses; everything else is allowed.
ControllerVerdict post_dependency(const agent::SessionState& state, const pdl::DependencyGraph& graph,
                                  const agent::Action& action);

ControllerVerdict post_api_repetition(const agent::SessionState& state, const agent::Action& action,
                                      const ControllerConfig& cfg);

// Deny once the user turn count exceeds cfg.max_total_turns.
ControllerVerdict post_conversation_length(const agent::SessionState& state,
                                           const ControllerConfig& cfg);

// True when no further user turn may start: the session has already used
// max_total_turns user turns and the length controller is enabled.
bool conversation_exhausted(const agent::SessionState& state, const ControllerConfig& cfg);

std::vector<PreGuidance> run_pre(const ControllerConfig& cfg, const agent::SessionState& state,
                                 const pdl::DependencyGraph& graph);

// First Deny in registration order, else Allow (controller_id "all").
ControllerVerdict run_post(const ControllerConfig& cfg, const agent::SessionState& state,
                           const pdl::DependencyGraph& graph, const agent::Action& action);

}  // namespace flowagent::control
