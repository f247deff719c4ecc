#pragma once

#include <memory>
#include <span>
#include <string>

#include "flowagent/agent/runtime.hpp"
#include "flowagent/agent/workflow.hpp"
#include "flowagent/eval/reference.hpp"
#include "flowagent/service/config.hpp"

namespace flowagent::service {

// Backend specs:
//   scripted:<file>   ScriptedBackend fixture (relative to the config directory)
//   openai            OpenAI-compatible chat completions (openai.* keys + env)
//   echo              replays the BOT turns of `references` in order
//   exact             exact-match turn judge
//   mechanical        no backend (returns nullptr); session success from task progress
// Throws std::invalid_argument for anything else.
std::shared_ptr<agent::LlmBackend> make_backend(const std::string& spec, const ServiceConfig& cfg,
                                                std::span<const eval::ReferenceSession> references = {});

// Agent of `kind` with the kind's default controllers overlaid by the config
// overrides and then by `extra`.
agent::Agent make_configured_agent(const std::string& kind, const agent::Workflow& workflow,
                                   std::shared_ptr<agent::LlmBackend> backend, const ServiceConfig& cfg,
                                   const ControllerOverrides& extra = {});

agent::ToolRegistry load_registry(const ServiceConfig& cfg, const pdl::PdlDocument& doc);

}  // namespace flowagent::service
