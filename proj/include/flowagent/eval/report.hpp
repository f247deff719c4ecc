#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowagent/eval/metrics.hpp"

namespace flowagent::eval {

struct AgentReport {
  std::string agent;
  MetricsSummary metrics;
};

agent::Json to_json(const ToolCounts& c);
agent::Json to_json(const MetricsReport& r);
agent::Json to_json(const MetricsSummary& s);
agent::Json to_json(const AgentReport& r);
agent::Json to_json(const TurnRecord& r);
agent::Json to_json(const SessionRecord& r);

MetricsReport metrics_report_from_json(const agent::Json& j);
MetricsSummary metrics_summary_from_json(const agent::Json& j);
AgentReport agent_report_from_json(const agent::Json& j);

// Rows are agents; columns are metric x split, with metrics that are empty
// for every agent left out. Fractions print with four decimals.
std::string render_markdown_table(std::span<const AgentReport> reports);

// Reads every report.json below `dir` (recursively, sorted by path). Agents
// appearing in several runs get the run directory name appended.
std::vector<AgentReport> load_reports(const std::filesystem::path& dir);

}  // namespace flowagent::eval
