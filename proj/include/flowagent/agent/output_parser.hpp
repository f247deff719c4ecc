#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "flowagent/agent/action.hpp"

namespace flowagent::agent {

struct ParseError {
  std::string reason;
  bool operator==(const ParseError&) const = default;
};

using PolicyOutput = std::variant<BotResponse, ToolCall, ParseError>;

// Recognizes the two output templates of the agent prompts:
//   Thought: ... / Response: ... [/ Answer: <node>]
//   Thought: ... / Action: <name> / Action Input: {json}
// Code fences are stripped; "API_" and "functions." prefixes on the action
// name are dropped.
PolicyOutput parse_llm_output(std::string_view text);

// Inverse of parse_llm_output for BotResponse and ToolCall.
std::string render_llm_output(const BotResponse& response);
std::string render_llm_output(const ToolCall& call);

}  // namespace flowagent::agent
