#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flowagent/agent/events.hpp"
#include "flowagent/agent/runtime.hpp"
#include "flowagent/eval/oow.hpp"
#include "flowagent/eval/profile.hpp"
#include "flowagent/eval/reference.hpp"

namespace flowagent::eval {

struct SessionConfig {
  std::string assistant_description;  // defaults to the workflow's Desc
  OowSpec oow;
  int hard_turn_cap = 50;             // applies even with the length controller off
};

struct SessionRun {
  ReferenceSession transcript;
  std::vector<agent::Event> events;
  agent::SessionState state;
  std::string end_reason;  // "user_end", "conversation_length", "turn_cap"
  int oow_turns = 0;
};

// Alternates simulate_user and the agent until the user ends, the length
// limit closes the session, or the hard cap is hit. Events go to `sink` when
// given and are always collected into the returned run.
SessionRun run_session(std::shared_ptr<const agent::Workflow> workflow, const agent::Agent& agent,
                       const UserProfile& profile, agent::LlmBackend& user_backend,
                       const agent::ToolRegistry& registry, const SessionConfig& cfg,
                       std::string session_id);

}  // namespace flowagent::eval
