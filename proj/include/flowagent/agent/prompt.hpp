#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowagent/agent/session.hpp"
#include "flowagent/agent/tools.hpp"
#include "flowagent/control/controllers.hpp"

namespace flowagent::agent {

// Prompt templates compiled into the binary from src/prompts/*.txt.
namespace prompts {
std::string_view user_simulation();
std::string_view flowagent();
std::string_view react();
std::string_view turn_judge();
std::string_view session_judge();
std::string_view answer_classifier();
}  // namespace prompts

// Substitutes `{{ name }}` / `{{name}}` placeholders; `{{ name | trim }}`
// trims surrounding whitespace. Throws std::invalid_argument for a
// placeholder without a value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

// OpenAI function-calling schema for a tool.
nlohmann::ordered_json tool_function_schema(const ToolSchema& schema);

// One "- name: {schema}" line per tool, in registry order. Tools listed in
// `blocked` get an indented "(blocked: requires ...)" annotation.
std::string render_api_infos(const ToolRegistry& registry,
                             const std::map<std::string, std::set<std::string>>& blocked = {});

// Transcript lines followed by any per-turn controller feedback; an empty
// history renders as kEmptyHistory.
inline constexpr std::string_view kEmptyHistory = "(no conversation yet)";
std::string render_history(std::span<const Action> history, std::span<const std::string> scratch = {});

// Executed nodes in topological order, the user turn count, and every
// guidance text.
std::string render_current_state(const SessionState& state,
                                 std::span<const control::PreGuidance> guidance);

struct PromptContext {
  const SessionState& state;
  std::span<const control::PreGuidance> guidance;
  std::span<const std::string> scratch;
  const ToolRegistry& registry;
};

class PromptBuilder {
 public:
  virtual ~PromptBuilder() = default;
  virtual std::string build(const PromptContext& ctx) const = 0;
  virtual std::string name() const = 0;
};

std::string build_prompt(const pdl::PdlDocument& doc, const SessionState& state,
                         std::span<const control::PreGuidance> guidance, const ToolRegistry& registry,
                         std::span<const std::string> scratch = {});

class FlowAgentPromptBuilder : public PromptBuilder {
 public:
  std::string build(const PromptContext& ctx) const override;
  std::string name() const override { return "flowagent"; }
};

}  // namespace flowagent::agent
