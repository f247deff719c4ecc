#include "flowagent/eval/session_runner.hpp"

#include <spdlog/spdlog.h>

#include "flowagent/eval/user_sim.hpp"

namespace flowagent::eval {

SessionRun run_session(std::shared_ptr<const agent::Workflow> workflow, const agent::Agent& agent,
                       const UserProfile& profile, agent::LlmBackend& user_backend,
                       const agent::ToolRegistry& registry, const SessionConfig& cfg,
                       std::string session_id) {
  agent::EventLog log;
  SessionRun run;
  run.state = agent::make_session(session_id, workflow);
  const std::string description =
      cfg.assistant_description.empty() ? workflow->doc.desc : cfg.assistant_description;

  for (int turn = 1;; ++turn) {
    if (control::conversation_exhausted(run.state, agent.controllers)) {
      agent::close_session(run.state, agent, control::kConversationLength, &log);
      run.end_reason = control::kConversationLength;
      break;
    }
    if (turn > cfg.hard_turn_cap) {
      agent::close_session(run.state, agent, "turn_cap", &log);
      run.end_reason = "turn_cap";
      break;
    }
    auto firing = inject_oow(cfg.oow, turn);
    auto reply = simulate_user(profile, description, run.state.history, user_backend,
                               firing ? std::optional(firing->instruction) : std::nullopt);
    if (reply.end) {
      agent::record(run.state, agent::SessionEnd{"user_end"}, &log);
      run.end_reason = "user_end";
      break;
    }
    agent::UserMessage message{reply.text, std::nullopt};
    if (firing) {
      message.oow = firing->annotation;
      ++run.oow_turns;
    }
    auto result = agent::handle_user_message(run.state, agent, registry, std::move(message), &log);
    if (result.session_ended) {
      run.end_reason = control::kConversationLength;
      break;
    }
  }
  spdlog::debug("session {} ended ({}) after {} user turns", session_id, run.end_reason,
                run.state.user_turns);
  run.events = log.events();
  run.transcript = from_actions(session_id, run.state.history);
  return run;
}

}  // namespace flowagent::eval
