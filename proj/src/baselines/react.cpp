#include "flowagent/baselines/react.hpp"

namespace flowagent::baselines {

std::string ReactPromptBuilder::build(const agent::PromptContext& ctx) const {
  if (!ctx.state.workflow) throw std::invalid_argument("session has no workflow");
  const auto& doc = ctx.state.workflow->doc;
  return agent::render_template(agent::prompts::react(),
                                {{"task_description", doc.name + ": " + doc.desc},
                                 {"workflow", workflow_.text},
                                 {"toolbox", agent::render_api_infos(ctx.registry)},
                                 {"current_time", current_time_},
                                 {"history_conversation", agent::render_history(ctx.state.history, ctx.scratch)}});
}

std::string ReactPromptBuilder::name() const {
  return std::string("react-") + to_string(workflow_.format);
}

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::FlowAgent: return "flowagent";
    case AgentKind::ReactNl: return "react-nl";
    case AgentKind::ReactCode: return "react-code";
    case AgentKind::ReactFc: return "react-fc";
  }
  return "?";
}

std::optional<AgentKind> parse_agent_kind(std::string_view text) {
  for (auto kind : {AgentKind::FlowAgent, AgentKind::ReactNl, AgentKind::ReactCode, AgentKind::ReactFc}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

agent::Agent make_agent(AgentKind kind, const pdl::PdlDocument& doc,
                        std::shared_ptr<agent::LlmBackend> backend, AgentOptions options) {
  agent::Agent out;
  out.kind = to_string(kind);
  out.backend = std::move(backend);
  out.classifier = std::move(options.classifier);
  out.runtime = std::move(options.runtime);
  switch (kind) {
    case AgentKind::FlowAgent:
      out.prompt = std::make_shared<agent::FlowAgentPromptBuilder>();
      out.controllers = options.controllers.value_or(control::ControllerConfig::all_enabled());
      break;
    case AgentKind::ReactNl:
    case AgentKind::ReactCode:
    case AgentKind::ReactFc: {
      const auto format = kind == AgentKind::ReactNl     ? WorkflowFormat::NL
                          : kind == AgentKind::ReactCode ? WorkflowFormat::Code
                                                         : WorkflowFormat::Flowchart;
      out.prompt = std::make_shared<ReactPromptBuilder>(render_workflow(doc, format), options.current_time);
      out.controllers = options.controllers.value_or(control::ControllerConfig::all_disabled());
      break;
    }
  }
  out.controllers.check();
  return out;
}

}  // namespace flowagent::baselines
