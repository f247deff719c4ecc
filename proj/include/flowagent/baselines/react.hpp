#pragma once

#include <memory>
#include <optional>
#include <string>

#include "flowagent/agent/runtime.hpp"
#include "flowagent/baselines/formats.hpp"

namespace flowagent::baselines {

// Fixed default keeps prompts (and therefore scripted runs) reproducible.
inline constexpr const char* kDefaultCurrentTime = "2024-06-03 09:00:00";

class ReactPromptBuilder : public agent::PromptBuilder {
 public:
  explicit ReactPromptBuilder(RenderedWorkflow workflow, std::string current_time = kDefaultCurrentTime)
      : workflow_(std::move(workflow)), current_time_(std::move(current_time)) {}

  std::string build(const agent::PromptContext& ctx) const override;
  std::string name() const override;

 private:
  RenderedWorkflow workflow_;
  std::string current_time_;
};

enum class AgentKind { FlowAgent, ReactNl, ReactCode, ReactFc };

// "flowagent", "react-nl", "react-code", "react-fc"
const char* to_string(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view text);

struct AgentOptions {
  // Defaults: every controller for FlowAgent, none for the ReAct baselines.
  std::optional<control::ControllerConfig> controllers;
  std::shared_ptr<const agent::AnswerClassifier> classifier;
  agent::RuntimeConfig runtime;
  std::string current_time = kDefaultCurrentTime;
};

agent::Agent make_agent(AgentKind kind, const pdl::PdlDocument& doc,
                        std::shared_ptr<agent::LlmBackend> backend, AgentOptions options = {});

}  // namespace flowagent::baselines
