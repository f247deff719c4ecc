#include "flowagent/service/agents.hpp"

#include "flowagent/baselines/react.hpp"
#include "flowagent/eval/judge.hpp"

namespace flowagent::service {

std::shared_ptr<agent::LlmBackend> make_backend(const std::string& spec, const ServiceConfig& cfg,
                                                std::span<const eval::ReferenceSession> references) {
  constexpr std::string_view kScripted = "scripted:";
  if (spec.starts_with(kScripted)) {
    return agent::ScriptedBackend::from_file(cfg.resolve(spec.substr(kScripted.size())));
  }
  if (spec == "openai") return std::make_shared<agent::OpenAiBackend>(cfg.openai);
  if (spec == "exact") return eval::make_exact_match_judge();
  if (spec == "mechanical") return nullptr;
  if (spec == "echo") {
    if (references.empty()) throw std::invalid_argument("echo backend needs reference sessions");
    std::vector<std::string> outputs;
    for (const auto& session : references) {
      for (auto& out : eval::echo_policy_outputs(session)) outputs.push_back(std::move(out));
    }
    return agent::ScriptedBackend::from_strings(std::move(outputs), agent::ScriptedBackend::OnExhausted::Error,
                                                "echo");
  }
  throw std::invalid_argument("unknown backend '" + spec + "'");
}

agent::Agent make_configured_agent(const std::string& kind, const agent::Workflow& workflow,
                                   std::shared_ptr<agent::LlmBackend> backend, const ServiceConfig& cfg,
                                   const ControllerOverrides& extra) {
  auto parsed = baselines::parse_agent_kind(kind);
  if (!parsed) throw std::invalid_argument("unknown agent kind '" + kind + "'");
  baselines::AgentOptions options;
  auto controllers = *parsed == baselines::AgentKind::FlowAgent ? control::ControllerConfig::all_enabled()
                                                                : control::ControllerConfig::all_disabled();
  cfg.controllers.apply(controllers);
  extra.apply(controllers);
  options.controllers = controllers;
  if (cfg.agent_classifier == "template") options.classifier = std::make_shared<agent::TemplateOverlapClassifier>();
  options.runtime = cfg.runtime;
  if (cfg.current_time) options.current_time = *cfg.current_time;
  return baselines::make_agent(*parsed, workflow.doc, std::move(backend), std::move(options));
}

agent::ToolRegistry load_registry(const ServiceConfig& cfg, const pdl::PdlDocument& doc) {
  if (cfg.tools.empty()) return agent::ToolRegistry::from_document(doc);
  return agent::ToolRegistry::from_file(cfg.resolve(cfg.tools), &doc);
}

}  // namespace flowagent::service
