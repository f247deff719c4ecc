#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowagent/agent/backend.hpp"
#include "flowagent/agent/events.hpp"
#include "flowagent/agent/labeler.hpp"
#include "flowagent/agent/prompt.hpp"
#include "flowagent/agent/session.hpp"
#include "flowagent/agent/tools.hpp"
#include "flowagent/control/controllers.hpp"

namespace flowagent::agent {

struct RuntimeConfig {
  CompletionParams params;
  std::string fallback_text =
      "Sorry, I am unable to handle that request right now. Could you rephrase it or give me more "
      "details?";
  std::string closing_text =
      "We have reached the length limit for this conversation. Thank you for your patience, "
      "goodbye.";
};

struct Agent {
  std::string kind = "flowagent";
  std::shared_ptr<const PromptBuilder> prompt;
  std::shared_ptr<LlmBackend> backend;
  control::ControllerConfig controllers;
  std::shared_ptr<const AnswerClassifier> classifier;  // optional
  RuntimeConfig runtime;
};

struct TurnResult {
  BotResponse response;
  std::vector<Action> emitted;  // appended to history, in order
  bool session_ended = false;
};

// First action the policy proposes that passes the post-decision
// controllers, without executing it. Falls back to a forced BotResponse once
// max_policy_retries_per_turn failures (parse errors, denials, backend
// errors) accumulate. Turn-level evaluation uses this directly.
struct PolicyDecision {
  Action action;  // ToolCall or BotResponse
  int failures = 0;
  bool fallback = false;
};
PolicyDecision decide_once(const SessionState& state, const Agent& agent, const ToolRegistry& registry,
                           EventSink* sink = nullptr);

// Runs the inner loop for the current turn; the last history item must be a
// UserMessage. Allowed tool calls are executed and the loop continues until a
// BotResponse is accepted or produced as a fallback.
TurnResult step(SessionState& state, const Agent& agent, const ToolRegistry& registry,
                EventSink* sink = nullptr);

// Appends the user message, enforces the conversation length limit (forced
// closing response plus SessionEnd once exceeded), then runs step().
TurnResult handle_user_message(SessionState& state, const Agent& agent, const ToolRegistry& registry,
                               UserMessage message, EventSink* sink = nullptr);

// Emits the forced closing BotResponse and a SessionEnd.
TurnResult close_session(SessionState& state, const Agent& agent, const std::string& reason,
                         EventSink* sink = nullptr);

// Appends `action` to the state and mirrors it to the sink.
void record(SessionState& state, const Action& action, EventSink* sink);

}  // namespace flowagent::agent
