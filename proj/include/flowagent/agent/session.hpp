#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"
#include "flowagent/agent/workflow.hpp"

namespace flowagent::agent {

struct SessionState {
  std::string session_id;
  std::shared_ptr<const Workflow> workflow;
  std::vector<Action> history;             // user-visible actions, no controller feedback
  std::map<std::string, int> executed;     // node -> successful executions
  int user_turns = 0;
  int clock = 0;                           // number of actions applied

  // Appends `action` and updates the counters. A successful ToolResult or a
  // labeled, policy-produced BotResponse counts as an execution of its node
  // when the node belongs to the workflow graph. ControllerFeedback is ignored.
  void apply(const Action& action);

  std::set<std::string> executed_set() const;
  int executed_count(const std::string& node) const;
};

SessionState make_session(std::string session_id, std::shared_ptr<const Workflow> workflow);

// Folds `actions` into a fresh state.
SessionState replay(std::string session_id, std::shared_ptr<const Workflow> workflow,
                    std::span<const Action> actions);

// Executions in `history` whose preconditions were not all executed before
// them (the compliance violations counted by the ablation experiments).
struct Violation {
  std::size_t index = 0;  // position in history
  std::string node;
  std::set<std::string> unmet;
};
std::vector<Violation> find_violations(std::span<const Action> history,
                                       const pdl::DependencyGraph& graph);

}  // namespace flowagent::agent
