#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowagent/agent/runtime.hpp"
#include "flowagent/eval/judge.hpp"
#include "flowagent/eval/reference.hpp"

namespace flowagent::eval {

// Micro-averaged tool-call counts over (name, slot, value) triples. A call
// without arguments contributes a single (name, -, -) triple so that tool
// selection is still scored.
struct ToolCounts {
  long matched = 0;
  long predicted = 0;
  long reference = 0;

  ToolCounts& operator+=(const ToolCounts& o) {
    matched += o.matched;
    predicted += o.predicted;
    reference += o.reference;
    return *this;
  }
  bool operator==(const ToolCounts&) const = default;

  // nullopt when both sides are empty; 0 when only one side is.
  std::optional<double> precision() const;
  std::optional<double> recall() const;
  std::optional<double> f1() const;
};

// Trimmed string equality, numeric when both sides parse as numbers.
bool slot_values_equal(const agent::Json& a, const agent::Json& b);

// Either side may be absent (a text turn).
ToolCounts score_tool_call(const agent::ToolCall* predicted, const ReferenceToolCall* reference);

struct TurnRecord {
  std::string session_id;
  std::size_t turn_index = 0;  // index into the reference turns
  bool oow = false;            // the most recent USER turn carries an OOW annotation
  bool tool_turn = false;      // the reference turn is a tool call
  bool consistent = false;
  std::optional<TurnJudgement> judgement;  // text turns only
  ToolCounts tool;
  std::string reference;  // transcript line
  std::string predicted;  // transcript line
  bool fallback = false;
};

struct TurnEvalConfig {
  std::string workflow_info;  // defaults to the rendered PDL
};

// For every BOT turn, replays the exact reference prefix into a fresh session
// and asks the agent for one decision. Tool-call turns are scored by exact
// match, text turns by the judge.
std::vector<TurnRecord> evaluate_turns(const ReferenceSession& reference,
                                       std::shared_ptr<const agent::Workflow> workflow,
                                       const agent::Agent& agent, const agent::ToolRegistry& registry,
                                       agent::LlmBackend& judge, const TurnEvalConfig& cfg = {});

}  // namespace flowagent::eval
