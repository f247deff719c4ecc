#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowagent/eval/metrics.hpp"
#include "flowagent/eval/report.hpp"
#include "flowagent/service/config.hpp"
#include "flowagent/service/manifest.hpp"

namespace flowagent::service {

struct RunResult {
  std::filesystem::path dir;  // empty when nothing was written
  RunManifest manifest;
  eval::AgentReport report;
  std::vector<eval::SessionRecord> sessions;
  std::vector<eval::TurnRecord> turns;
};

// Report JSON: {"agent", "metrics", "sessions"?, "turns"?}.
agent::Json report_json(const RunResult& run);

struct SimulateOptions {
  std::filesystem::path workflow;
  std::filesystem::path out_dir;
  std::string agent_kind;  // config agent.kind when empty
  int sessions = 1;
  std::uint64_t seed = 0;
  double oow_prob = 0.0;
  std::optional<agent::OowKind> oow_kind;  // round-robin over the three kinds when unset
  std::filesystem::path profile;           // config user.profile when empty
};

// Per-session seed derived from the run seed and the session index.
std::uint64_t session_seed(std::uint64_t seed, int index);

// Writes out_dir/manifest.json, report.json, report.md and per session
// sessions/session_NNN.{transcript.jsonl,events.jsonl,meta.json}. Each session
// gets fresh backends so scripted fixtures restart. Throws when out_dir
// already holds a manifest.
RunResult simulate_run(const SimulateOptions& opts, const ServiceConfig& cfg);

struct TurnEvalOptions {
  std::filesystem::path reference;
  std::filesystem::path workflow;
  std::string agent_kind;  // config agent.kind when empty
  std::string backend;     // config agent.backend when empty
  std::filesystem::path out_dir;  // optional
};
RunResult evaluate_turn_run(const TurnEvalOptions& opts, const ServiceConfig& cfg);

struct SessionEvalOptions {
  std::filesystem::path transcripts;  // a run directory or its sessions/ directory
  std::filesystem::path workflow;     // optional; taken from the run manifest when present
  std::filesystem::path out_dir;      // optional
};
RunResult evaluate_session_run(const SessionEvalOptions& opts, const ServiceConfig& cfg);

}  // namespace flowagent::service
