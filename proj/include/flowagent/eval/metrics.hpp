#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowagent/eval/turn_eval.hpp"

namespace flowagent::eval {

struct SessionRecord {
  std::string session_id;
  bool success = false;
  double task_progress = 0.0;
  int user_turns = 0;
  int oow_turns = 0;
  ToolCounts tool;  // distinct successfully called APIs against the required nodes
  std::string end_reason;
};

// Builds a session record; tool counts compare the distinct APIs with a
// successful ToolResult against `required_nodes`.
SessionRecord make_session_record(std::string session_id, std::span<const agent::Action> transcript,
                                  std::span<const std::string> required_nodes, const SessionJudgement& judgement,
                                  std::string end_reason = {});

enum class Split { Overall, IW, OOW };
const char* to_string(Split split);  // "overall", "IW", "OOW"

struct MetricCounts {
  long sessions = 0;
  long turns = 0;
  long oow_turns = 0;
  bool operator==(const MetricCounts&) const = default;
};

// Fractions are nullopt when the split has nothing to average.
struct MetricsReport {
  Split split = Split::Overall;
  std::optional<double> pass_rate;
  std::optional<double> success_rate;
  std::optional<double> task_progress;
  std::optional<double> tool_precision;
  std::optional<double> tool_recall;
  std::optional<double> tool_f1;
  MetricCounts counts;
  ToolCounts tool;
};

struct MetricsSummary {
  MetricsReport overall;
  MetricsReport iw;
  MetricsReport oow;
};

// Turn records go to the split of their `oow` flag. A session record lands in
// OOW when it has at least one OOW user turn; its user turns are partitioned
// between the splits by its oow_turns count.
MetricsReport compute_report(Split split, std::span<const TurnRecord> turns, std::span<const SessionRecord> sessions);
MetricsSummary compute_metrics(std::span<const TurnRecord> turns, std::span<const SessionRecord> sessions);

}  // namespace flowagent::eval
