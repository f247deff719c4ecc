#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"
#include "flowagent/agent/backend.hpp"

namespace flowagent::eval {

struct TurnJudgement {
  std::optional<int> correctness;
  std::optional<int> helpfulness;
  std::optional<int> humanness;
  bool consistent = false;
  bool parsed = false;  // false when the judge output could not be read twice

  bool operator==(const TurnJudgement&) const = default;
};

std::string build_turn_judge_prompt(const std::string& workflow_info, const std::string& session,
                                    const std::string& reference, const std::string& predicted);

// Needs a "Consistency: Yes|No" line; score lines are optional.
std::optional<TurnJudgement> parse_turn_judgement(std::string_view text);

// One retry on unparseable output or backend error, then inconsistent.
TurnJudgement judge_turn(const std::string& workflow_info, const std::string& prefix,
                         const std::string& reference_response, const std::string& predicted_response,
                         agent::LlmBackend& judge);

// Oracle judge: answers the turn prompt with "Consistency: Yes" exactly when
// the predicted and reference responses are equal after whitespace trimming.
std::shared_ptr<agent::LlmBackend> make_exact_match_judge();

struct SessionJudgement {
  bool success = false;
  double task_progress = 0.0;
  std::vector<std::string> completed;  // required nodes with a successful execution
  std::vector<std::string> warnings;
};

// |required nodes with a successful ToolResult| / |required|; 1.0 with a
// warning when `required` is empty.
double task_progress(std::span<const agent::Action> transcript, std::span<const std::string> required,
                     std::vector<std::string>* completed = nullptr, std::vector<std::string>* warnings = nullptr);

std::string build_session_judge_prompt(const std::string& workflow_info, const std::string& user_needs,
                                       const std::string& session);
std::optional<bool> parse_session_success(std::string_view text);

// With a judge backend, success comes from its "Success: Yes/No" verdict (one
// retry, then false). Without one, success means task_progress == 1.
SessionJudgement judge_session(const std::string& workflow_info, std::span<const agent::Action> transcript,
                               std::span<const std::string> required_nodes, const std::string& user_needs,
                               agent::LlmBackend* judge);

}  // namespace flowagent::eval
