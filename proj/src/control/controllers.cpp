#include "flowagent/control/controllers.hpp"

#include <algorithm>
#include <stdexcept>

namespace flowagent::control {

namespace {

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

ControllerVerdict allow(const char* id) { return {id, Decision::Allow, std::nullopt}; }
ControllerVerdict deny(const char* id, std::string feedback) {
  return {id, Decision::Deny, std::move(feedback)};
}

// Node the action would execute, and whether it is an API call.
std::optional<std::pair<std::string, bool>> target_node(const agent::Action& action) {
  if (const auto* call = std::get_if<agent::ToolCall>(&action)) return std::pair{call->name, true};
  if (const auto* resp = std::get_if<agent::BotResponse>(&action)) {
    if (resp->answer_node) return std::pair{*resp->answer_node, false};
  }
  return std::nullopt;
}

}  // namespace

const std::vector<std::string>& registered_controllers() {
  static const std::vector<std::string> kOrder = {kNodeDependency, kApiRepetition,
                                                  kConversationLength};
  return kOrder;
}

void ControllerConfig::check() const {
  if (max_identical_api_calls < 1 || max_total_turns < 1 || max_policy_retries_per_turn < 1 ||
      max_tool_calls_per_turn < 1) {
    throw std::invalid_argument("controller bounds must be >= 1");
  }
  const auto& known = registered_controllers();
  for (const auto* set : {&enabled_pre, &enabled_post}) {
    for (const auto& id : *set) {
      if (std::find(known.begin(), known.end(), id) == known.end()) {
        throw std::invalid_argument("unknown controller id: " + id);
      }
    }
  }
}

PreGuidance pre_dependency(const agent::SessionState& state, const pdl::DependencyGraph& graph) {
  auto access = pdl::accessible_nodes(graph, state.executed_set());
  std::string text = "Accessible nodes: ";
  text += access.accessible.empty() ? "(none)" : join(access.accessible);
  if (access.blocked.empty()) {
    text += "\nBlocked nodes: (none)";
  } else {
    text += "\nBlocked nodes (do not call or answer with these yet):";
    for (const auto& [node, unmet] : access.blocked) {
      text += "\n- " + node + ": requires " + join(unmet);
    }
  }
  return {kNodeDependency, std::move(text), std::move(access.blocked)};
}

ControllerVerdict post_dependency(const agent::SessionState& state, const pdl::DependencyGraph& graph,
                                  const agent::Action& action) {
  auto target = target_node(action);
  if (!target) return allow(kNodeDependency);
  const auto& [node, is_api] = *target;
  if (!graph.contains(node)) {
    return deny(kNodeDependency, std::string("unknown node '") + node +
                                     "': it is not declared in the workflow. Use one of the "
                                     "declared " + (is_api ? "APIs." : "ANSWER nodes."));
  }
  std::set<std::string> unmet;
  for (const auto& p : graph.preconditions(node)) {
    if (state.executed_count(p) == 0) unmet.insert(p);
  }
  if (unmet.empty()) return allow(kNodeDependency);
  return deny(kNodeDependency, std::string(is_api ? "Cannot call API " : "Cannot give answer ") +
                                   node + " yet: unmet preconditions " + join(unmet) +
                                   ". Complete those steps first.");
}

ControllerVerdict post_api_repetition(const agent::SessionState& state, const agent::Action& action,
                                      const ControllerConfig& cfg) {
  const auto* call = std::get_if<agent::ToolCall>(&action);
  if (!call) return allow(kApiRepetition);
  const std::string key = agent::canonical_args(call->args);
  int count = 0;
  const agent::ToolCall* pending = nullptr;
  for (const auto& a : state.history) {
    if (const auto* c = std::get_if<agent::ToolCall>(&a)) {
      pending = c;
    } else if (const auto* r = std::get_if<agent::ToolResult>(&a)) {
      if (pending && r->ok && pending->name == call->name && r->name == call->name &&
          agent::canonical_args(pending->args) == key) {
        ++count;
      }
      pending = nullptr;
    }
  }
  if (count < cfg.max_identical_api_calls) return allow(kApiRepetition);
  return deny(kApiRepetition, "API " + call->name + " has already been called " +
                                  std::to_string(count) + " times with arguments " + key +
                                  " (limit " + std::to_string(cfg.max_identical_api_calls) +
                                  "). Use the earlier result or ask the user for new information.");
}

ControllerVerdict post_conversation_length(const agent::SessionState& state,
                                           const ControllerConfig& cfg) {
  if (state.user_turns <= cfg.max_total_turns) return allow(kConversationLength);
  return deny(kConversationLength, "The conversation has reached " + std::to_string(state.user_turns) +
                                       " user turns (limit " + std::to_string(cfg.max_total_turns) +
                                       "). Close the conversation politely.");
}

bool conversation_exhausted(const agent::SessionState& state, const ControllerConfig& cfg) {
  return cfg.enabled_post.contains(kConversationLength) && state.user_turns >= cfg.max_total_turns;
}

std::vector<PreGuidance> run_pre(const ControllerConfig& cfg, const agent::SessionState& state,
                                 const pdl::DependencyGraph& graph) {
  std::vector<PreGuidance> out;
  if (cfg.enabled_pre.contains(kNodeDependency)) out.push_back(pre_dependency(state, graph));
  return out;
}

ControllerVerdict run_post(const ControllerConfig& cfg, const agent::SessionState& state,
                           const pdl::DependencyGraph& graph, const agent::Action& action) {
  if (cfg.enabled_post.contains(kNodeDependency)) {
    auto v = post_dependency(state, graph, action);
    if (!v.allowed()) return v;
  }
  if (cfg.enabled_post.contains(kApiRepetition)) {
    auto v = post_api_repetition(state, action, cfg);
    if (!v.allowed()) return v;
  }
  if (cfg.enabled_post.contains(kConversationLength)) {
    auto v = post_conversation_length(state, cfg);
    if (!v.allowed()) return v;
  }
  return allow("all");
}

}  // namespace flowagent::control
