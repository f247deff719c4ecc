#include "flowagent/service/runs.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include <spdlog/spdlog.h>

#include "flowagent/eval/profile.hpp"
#include "flowagent/eval/session_runner.hpp"
#include "flowagent/pdl/render.hpp"
#include "flowagent/service/agents.hpp"

namespace flowagent::service {

namespace fs = std::filesystem;
using agent::Json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string session_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "session_%03d", index);
  return buf;
}

void prepare_out_dir(const fs::path& dir) {
  if (fs::exists(dir / "manifest.json")) {
    throw std::runtime_error("run directory " + dir.string() + " already has a manifest");
  }
  fs::create_directories(dir);
}

void finish_run(RunResult& run) {
  if (run.dir.empty()) return;
  write_text(run.dir / "report.json", report_json(run).dump(2) + "\n");
  write_text(run.dir / "report.md", eval::render_markdown_table(std::span(&run.report, 1)));
  run.manifest.completed_at = utc_timestamp();
  run.manifest.run_id = compute_run_id(run.manifest);
  write_manifest(run.dir / "manifest.json", run.manifest);
}

std::string identity_of(const std::shared_ptr<agent::LlmBackend>& backend, const std::string& spec) {
  return backend ? backend->identity() : spec;
}

}  // namespace

Json report_json(const RunResult& run) {
  auto j = eval::to_json(run.report);
  if (!run.sessions.empty()) {
    j["sessions"] = Json::array();
    for (const auto& s : run.sessions) j["sessions"].push_back(eval::to_json(s));
  }
  if (!run.turns.empty()) {
    j["turns"] = Json::array();
    for (const auto& t : run.turns) j["turns"].push_back(eval::to_json(t));
  }
  return j;
}

std::uint64_t session_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 gen(seq);
  return gen();
}

RunResult simulate_run(const SimulateOptions& opts, const ServiceConfig& cfg) {
  if (opts.sessions < 1) throw std::invalid_argument("--sessions must be at least 1");
  if (opts.oow_prob < 0.0 || opts.oow_prob > 1.0) throw std::invalid_argument("--oow-prob must be in [0, 1]");
  const std::string kind = opts.agent_kind.empty() ? cfg.agent_kind : opts.agent_kind;
  if (cfg.agent_backend.empty()) throw std::invalid_argument("agent.backend is not configured");
  if (cfg.user_backend.empty()) throw std::invalid_argument("user.backend is not configured");
  if (opts.profile.empty() && cfg.user_profile.empty()) {
    throw std::invalid_argument("no user profile (--profile or user.profile)");
  }
  const fs::path profile_path = opts.profile.empty() ? cfg.resolve(cfg.user_profile) : opts.profile;

  auto workflow = agent::load_workflow_file(opts.workflow);
  const auto profile = eval::load_profile(profile_path);
  const auto registry = load_registry(cfg, workflow->doc);
  const auto workflow_info = pdl::render_for_prompt(workflow->doc);

  RunResult run;
  run.dir = opts.out_dir;
  prepare_out_dir(run.dir);
  fs::create_directories(run.dir / "sessions");

  auto& m = run.manifest;
  m.command = "simulate";
  m.workflow_path = opts.workflow.string();
  m.workflow_hash = workflow->content_hash;
  m.agent_kind = kind;
  m.seed = opts.seed;
  m.sessions = opts.sessions;
  m.oow = Json{{"probability", opts.oow_prob},
               {"kind", opts.oow_kind ? Json(agent::to_string(*opts.oow_kind)) : Json("round_robin")}};
  m.created_at = utc_timestamp();

  for (int i = 0; i < opts.sessions; ++i) {
    const auto seed = session_seed(opts.seed, i);
    auto agent_backend = make_backend(cfg.agent_backend, cfg);
    auto user_backend = make_backend(cfg.user_backend, cfg);
    auto judge_backend = make_backend(cfg.judge_session, cfg);
    auto agent = make_configured_agent(kind, *workflow, agent_backend, cfg);
    if (i == 0) {
      m.agent_backend = agent_backend->identity();
      m.user_backend = user_backend->identity();
      m.judge_backend = identity_of(judge_backend, cfg.judge_session);
      m.controllers = to_json(agent.controllers);
    }
    m.session_seeds.push_back(seed);

    eval::SessionConfig scfg;
    scfg.hard_turn_cap = cfg.hard_turn_cap;
    scfg.oow.kind = opts.oow_kind.value_or(agent::kAllOowKinds[i % 3]);
    scfg.oow.seed = seed;
    if (opts.oow_prob > 0.0) scfg.oow.probability = opts.oow_prob;

    const auto name = session_name(i);
    auto session = eval::run_session(workflow, agent, profile, *user_backend, registry, scfg, name);
    const auto judgement = eval::judge_session(workflow_info, session.state.history, profile.required_nodes,
                                               profile.needs, judge_backend.get());
    for (const auto& w : judgement.warnings) spdlog::warn("{}: {}", name, w);
    auto record = eval::make_session_record(name, session.state.history, profile.required_nodes, judgement,
                                            session.end_reason);

    const auto base = run.dir / "sessions" / name;
    write_text(base.string() + ".transcript.jsonl", eval::to_jsonl(session.transcript));
    std::string events;
    for (const auto& e : session.events) events += agent::to_json(e).dump() + "\n";
    write_text(base.string() + ".events.jsonl", events);
    Json meta{{"session_id", name},
              {"seed", seed},
              {"oow", Json{{"kind", agent::to_string(scfg.oow.kind)}, {"probability", opts.oow_prob}}},
              {"required_nodes", profile.required_nodes},
              {"user_needs", profile.needs},
              {"end_reason", session.end_reason},
              {"record", eval::to_json(record)}};
    write_text(base.string() + ".meta.json", meta.dump(2) + "\n");
    run.sessions.push_back(std::move(record));
  }

  run.report = {kind, eval::compute_metrics({}, run.sessions)};
  m.report = "report.json";
  finish_run(run);
  return run;
}

RunResult evaluate_turn_run(const TurnEvalOptions& opts, const ServiceConfig& cfg) {
  const std::string kind = opts.agent_kind.empty() ? cfg.agent_kind : opts.agent_kind;
  const std::string backend_spec = opts.backend.empty() ? cfg.agent_backend : opts.backend;
  if (backend_spec.empty()) throw std::invalid_argument("no agent backend (--backend or agent.backend)");

  auto workflow = agent::load_workflow_file(opts.workflow);
  const auto references = eval::load_reference_file(opts.reference);
  const auto registry = load_registry(cfg, workflow->doc);
  auto backend = make_backend(backend_spec, cfg, references);
  auto judge = make_backend(cfg.judge_turn, cfg);
  if (!judge) throw std::invalid_argument("judge.turn needs a backend");
  auto agent = make_configured_agent(kind, *workflow, backend, cfg);

  RunResult run;
  run.dir = opts.out_dir;
  if (!run.dir.empty()) prepare_out_dir(run.dir);
  auto& m = run.manifest;
  m.command = "evaluate-turn";
  m.workflow_path = opts.workflow.string();
  m.workflow_hash = workflow->content_hash;
  m.agent_kind = kind;
  m.agent_backend = backend->identity();
  m.judge_backend = judge->identity();
  m.controllers = to_json(agent.controllers);
  m.sessions = static_cast<int>(references.size());
  m.created_at = utc_timestamp();

  for (const auto& ref : references) {
    auto records = eval::evaluate_turns(ref, workflow, agent, registry, *judge);
    run.turns.insert(run.turns.end(), records.begin(), records.end());
  }
  run.report = {kind, eval::compute_metrics(run.turns, {})};
  finish_run(run);
  return run;
}

RunResult evaluate_session_run(const SessionEvalOptions& opts, const ServiceConfig& cfg) {
  fs::path dir = opts.transcripts;
  if (fs::is_directory(dir / "sessions")) dir /= "sessions";
  if (!fs::is_directory(dir)) throw std::invalid_argument("no transcript directory at " + opts.transcripts.string());

  std::optional<RunManifest> source;
  for (const auto& candidate : {opts.transcripts / "manifest.json", dir.parent_path() / "manifest.json"}) {
    if (fs::exists(candidate)) {
      source = read_manifest(candidate);
      break;
    }
  }
  fs::path workflow_path = opts.workflow;
  if (workflow_path.empty() && source) workflow_path = source->workflow_path;
  std::string workflow_info;
  std::string workflow_hash;
  if (!workflow_path.empty()) {
    auto workflow = agent::load_workflow_file(workflow_path);
    workflow_info = pdl::render_for_prompt(workflow->doc);
    workflow_hash = workflow->content_hash;
  }
  auto judge = make_backend(cfg.judge_session, cfg);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.ends_with(".transcript.jsonl")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::invalid_argument("no *.transcript.jsonl files in " + dir.string());

  RunResult run;
  run.dir = opts.out_dir;
  if (!run.dir.empty()) prepare_out_dir(run.dir);
  for (const auto& file : files) {
    const auto stem = file.filename().string().substr(0, file.filename().string().size() -
                                                             std::string_view(".transcript.jsonl").size());
    std::vector<std::string> required;
    std::string needs;
    std::string end_reason;
    const auto meta_path = dir / (stem + ".meta.json");
    if (fs::exists(meta_path)) {
      auto meta = Json::parse(agent::read_file(meta_path));
      required = meta.value("required_nodes", std::vector<std::string>{});
      needs = meta.value("user_needs", "");
      end_reason = meta.value("end_reason", "");
    }
    for (const auto& session : eval::parse_jsonl(agent::read_file(file))) {
      const auto actions = eval::to_actions(session);
      const auto judgement = eval::judge_session(workflow_info, actions, required, needs, judge.get());
      for (const auto& w : judgement.warnings) spdlog::warn("{}: {}", session.session_id, w);
      run.sessions.push_back(eval::make_session_record(session.session_id, actions, required, judgement, end_reason));
    }
  }

  const std::string label = source ? source->agent_kind : "transcripts";
  run.report = {label, eval::compute_metrics({}, run.sessions)};
  auto& m = run.manifest;
  m.command = "evaluate-session";
  m.workflow_path = workflow_path.string();
  m.workflow_hash = workflow_hash;
  m.agent_kind = label;
  if (source) m.agent_backend = source->agent_backend;
  m.judge_backend = identity_of(judge, cfg.judge_session);
  m.sessions = static_cast<int>(run.sessions.size());
  m.created_at = utc_timestamp();
  finish_run(run);
  return run;
}

}  // namespace flowagent::service
