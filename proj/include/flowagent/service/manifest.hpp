#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"

namespace flowagent::service {

struct RunManifest {
  std::string run_id;
  std::string command;  // "simulate", "evaluate-turn", "evaluate-session"
  std::string workflow_path;
  std::string workflow_hash;
  std::string agent_kind;
  std::string agent_backend;  // backend identity
  std::string user_backend;
  std::string judge_backend;
  agent::Json controllers = agent::Json::object();
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> session_seeds;
  agent::Json oow = agent::Json::object();
  int sessions = 0;
  std::string report = "report.json";
  std::string created_at;
  std::string completed_at;
};

agent::Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const agent::Json& j);

// Hash of every field except run_id and the timestamps.
std::string compute_run_id(const RunManifest& m);

// Creates `path` exclusively; throws std::runtime_error when it already exists.
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

// True when the workflow file still hashes to the recorded content hash.
bool workflow_hash_matches(const RunManifest& m);

std::string utc_timestamp();

}  // namespace flowagent::service
