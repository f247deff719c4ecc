#include "flowagent/service/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "flowagent/agent/workflow.hpp"

namespace flowagent::service {

using agent::Json;

Json to_json(const RunManifest& m) {
  Json j;
  j["run_id"] = m.run_id;
  j["command"] = m.command;
  j["workflow"] = Json{{"path", m.workflow_path}, {"content_hash", m.workflow_hash}};
  j["agent"] = Json{{"kind", m.agent_kind}, {"backend", m.agent_backend}};
  j["user_backend"] = m.user_backend;
  j["judge_backend"] = m.judge_backend;
  j["controllers"] = m.controllers;
  j["seeds"] = Json{{"seed", m.seed}, {"sessions", m.session_seeds}};
  j["oow"] = m.oow;
  j["sessions"] = m.sessions;
  j["report"] = m.report;
  j["created_at"] = m.created_at;
  j["completed_at"] = m.completed_at;
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.workflow_path = j.at("workflow").at("path").get<std::string>();
  m.workflow_hash = j.at("workflow").at("content_hash").get<std::string>();
  m.agent_kind = j.at("agent").at("kind").get<std::string>();
  m.agent_backend = j.at("agent").at("backend").get<std::string>();
  m.user_backend = j.value("user_backend", "");
  m.judge_backend = j.value("judge_backend", "");
  m.controllers = j.value("controllers", Json::object());
  m.seed = j.at("seeds").at("seed").get<std::uint64_t>();
  m.session_seeds = j.at("seeds").at("sessions").get<std::vector<std::uint64_t>>();
  m.oow = j.value("oow", Json::object());
  m.sessions = j.value("sessions", 0);
  m.report = j.value("report", "report.json");
  m.created_at = j.value("created_at", "");
  m.completed_at = j.value("completed_at", "");
  return m;
}

std::string compute_run_id(const RunManifest& m) {
  auto j = to_json(m);
  j.erase("run_id");
  j.erase("created_at");
  j.erase("completed_at");
  return agent::sha256_hex(j.dump()).substr(0, 12);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::FILE* f = std::fopen(path.c_str(), "wx");
  if (!f) throw std::runtime_error("manifest " + path.string() + " already exists or cannot be created");
  const auto text = to_json(m).dump(2) + "\n";
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("failed to write manifest " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(Json::parse(agent::read_file(path)));
}

bool workflow_hash_matches(const RunManifest& m) {
  try {
    return agent::sha256_hex(agent::read_file(m.workflow_path)) == m.workflow_hash;
  } catch (const std::exception&) {
    return false;
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace flowagent::service
