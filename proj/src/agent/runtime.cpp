#include "flowagent/agent/runtime.hpp"

#include <spdlog/spdlog.h>

#include "flowagent/agent/output_parser.hpp"

namespace flowagent::agent {

namespace {

void emit_event(EventSink* sink, const SessionState& state, const char* type, Json payload) {
  if (sink) sink->emit(state.session_id, state.user_turns, type, std::move(payload));
}

Json reason_payload(const std::string& reason) {
  Json out = Json::object();
  out["reason"] = reason;
  return out;
}

// Retry loop shared by step() and decide_once(). Returns the first action the
// controllers allow, or nullopt once the failure budget is spent.
std::optional<Action> decide(const SessionState& state, const Agent& agent,
                             const ToolRegistry& registry, EventSink* sink,
                             std::vector<std::string>& scratch, int& failures, int tool_calls) {
  const auto& cfg = agent.controllers;
  const auto& graph = state.workflow->graph;
  while (failures < cfg.max_policy_retries_per_turn) {
    const auto guidance = control::run_pre(cfg, state, graph);
    const std::string prompt = agent.prompt->build({state, guidance, scratch, registry});
    std::string text;
    try {
      text = agent.backend->complete_prompt(prompt, agent.runtime.params);
    } catch (const BackendError& e) {
      ++failures;
      spdlog::warn("session {}: backend error: {}", state.session_id, e.what());
      emit_event(sink, state, "backend_error", reason_payload(e.what()));
      continue;
    }

    auto parsed = parse_llm_output(text);
    if (const auto* err = std::get_if<ParseError>(&parsed)) {
      ++failures;
      emit_event(sink, state, "parse_error", reason_payload(err->reason));
      scratch.push_back("Your previous output could not be parsed (" + err->reason +
                        "). Follow one of the output templates exactly.");
      continue;
    }

    Action action = std::holds_alternative<ToolCall>(parsed) ? Action(std::get<ToolCall>(parsed))
                                                              : Action(std::get<BotResponse>(parsed));
    if (auto* resp = std::get_if<BotResponse>(&action)) {
      resp->answer_node = label_answer_node(resp->text, resp->answer_node, state.workflow->doc,
                                            agent.classifier.get());
      if (!resp->answer_node) {
        Json payload = Json::object();
        payload["text"] = resp->text;
        emit_event(sink, state, "label_skipped", std::move(payload));
      }
    } else if (tool_calls >= cfg.max_tool_calls_per_turn) {
      ++failures;
      ControllerFeedback fb{"tool_call_cap", "Tool-call limit of " +
                                                 std::to_string(cfg.max_tool_calls_per_turn) +
                                                 " per turn reached. Reply to the user now."};
      emit_event(sink, state, "controller_feedback", to_json(fb));
      scratch.push_back(fb.text);
      continue;
    }

    auto verdict = control::run_post(cfg, state, graph, action);
    if (!verdict.allowed()) {
      ++failures;
      ControllerFeedback fb{verdict.controller_id, verdict.feedback.value_or("denied")};
      emit_event(sink, state, "controller_feedback", to_json(fb));
      scratch.push_back(fb.text);
      continue;
    }
    return action;
  }
  return std::nullopt;
}

BotResponse fallback_response(const Agent& agent) {
  return BotResponse{agent.runtime.fallback_text, std::nullopt, std::nullopt, true};
}

}  // namespace

void record(SessionState& state, const Action& action, EventSink* sink) {
  state.apply(action);
  emit_event(sink, state, action_type(action), to_json(action));
}

PolicyDecision decide_once(const SessionState& state, const Agent& agent, const ToolRegistry& registry,
                           EventSink* sink) {
  std::vector<std::string> scratch;
  int failures = 0;
  if (auto action = decide(state, agent, registry, sink, scratch, failures, 0)) {
    return {std::move(*action), failures, false};
  }
  return {fallback_response(agent), failures, true};
}

TurnResult step(SessionState& state, const Agent& agent, const ToolRegistry& registry,
                EventSink* sink) {
  if (!state.workflow) throw std::invalid_argument("session has no workflow");
  if (state.history.empty() || !std::holds_alternative<UserMessage>(state.history.back())) {
    throw std::logic_error("step() requires the last history item to be a user message");
  }
  TurnResult result;
  std::vector<std::string> scratch;
  int failures = 0;
  int tool_calls = 0;
  while (true) {
    auto action = decide(state, agent, registry, sink, scratch, failures, tool_calls);
    if (!action) {
      result.response = fallback_response(agent);
      record(state, result.response, sink);
      result.emitted.push_back(result.response);
      return result;
    }
    if (auto* resp = std::get_if<BotResponse>(&*action)) {
      result.response = *resp;
      record(state, *action, sink);
      result.emitted.push_back(std::move(*action));
      return result;
    }
    const auto& call = std::get<ToolCall>(*action);
    ToolResult tool_result = execute_tool(registry, call, prior_tool_calls(state.history, call.name));
    record(state, call, sink);
    result.emitted.push_back(call);
    record(state, tool_result, sink);
    result.emitted.push_back(std::move(tool_result));
    ++tool_calls;
  }
}

TurnResult close_session(SessionState& state, const Agent& agent, const std::string& reason,
                         EventSink* sink) {
  TurnResult result;
  result.response = BotResponse{agent.runtime.closing_text, std::nullopt, std::nullopt, true};
  record(state, result.response, sink);
  result.emitted.push_back(result.response);
  SessionEnd end{reason};
  record(state, end, sink);
  result.emitted.push_back(end);
  result.session_ended = true;
  return result;
}

TurnResult handle_user_message(SessionState& state, const Agent& agent, const ToolRegistry& registry,
                               UserMessage message, EventSink* sink) {
  record(state, message, sink);
  if (agent.controllers.enabled_post.contains(control::kConversationLength)) {
    auto verdict = control::post_conversation_length(state, agent.controllers);
    if (!verdict.allowed()) {
      emit_event(sink, state, "controller_feedback",
                 to_json(ControllerFeedback{verdict.controller_id, *verdict.feedback}));
      auto closed = close_session(state, agent, control::kConversationLength, sink);
      return closed;
    }
  }
  return step(state, agent, registry, sink);
}

}  // namespace flowagent::agent
