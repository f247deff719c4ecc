#include "flowagent/agent/session.hpp"

namespace flowagent::agent {

namespace {

bool in_graph(const SessionState& state, const std::string& node) {
  return !state.workflow || state.workflow->graph.contains(node);
}

// Node executed by `action`, if any.
std::optional<std::string> executed_node(const Action& action) {
  if (const auto* r = std::get_if<ToolResult>(&action)) {
    if (r->ok) return r->name;
  } else if (const auto* b = std::get_if<BotResponse>(&action)) {
    if (b->answer_node && !b->forced) return b->answer_node;
  }
  return std::nullopt;
}

}  // namespace

void SessionState::apply(const Action& action) {
  if (std::holds_alternative<ControllerFeedback>(action)) return;
  if (std::holds_alternative<UserMessage>(action)) ++user_turns;
  if (auto node = executed_node(action); node && in_graph(*this, *node)) ++executed[*node];
  history.push_back(action);
  ++clock;
}

std::set<std::string> SessionState::executed_set() const {
  std::set<std::string> out;
  for (const auto& [node, count] : executed) {
    if (count > 0) out.insert(node);
  }
  return out;
}

int SessionState::executed_count(const std::string& node) const {
  auto it = executed.find(node);
  return it == executed.end() ? 0 : it->second;
}

SessionState make_session(std::string session_id, std::shared_ptr<const Workflow> workflow) {
  SessionState state;
  state.session_id = std::move(session_id);
  state.workflow = std::move(workflow);
  return state;
}

SessionState replay(std::string session_id, std::shared_ptr<const Workflow> workflow,
                    std::span<const Action> actions) {
  auto state = make_session(std::move(session_id), std::move(workflow));
  for (const auto& a : actions) state.apply(a);
  return state;
}

std::vector<Violation> find_violations(std::span<const Action> history,
                                       const pdl::DependencyGraph& graph) {
  std::vector<Violation> out;
  std::set<std::string> executed;
  for (std::size_t i = 0; i < history.size(); ++i) {
    auto node = executed_node(history[i]);
    if (!node || !graph.contains(*node)) continue;
    std::set<std::string> unmet;
    for (const auto& p : graph.preconditions(*node)) {
      if (!executed.contains(p)) unmet.insert(p);
    }
    if (!unmet.empty()) out.push_back({i, *node, std::move(unmet)});
    executed.insert(*node);
  }
  return out;
}

}  // namespace flowagent::agent
