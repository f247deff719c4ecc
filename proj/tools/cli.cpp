#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "flowagent/agent/workflow.hpp"
#include "flowagent/eval/report.hpp"
#include "flowagent/pdl/graph.hpp"
#include "flowagent/pdl/validate.hpp"
#include "flowagent/service/agents.hpp"
#include "flowagent/service/config.hpp"
#include "flowagent/service/runs.hpp"
#include "flowagent/service/server.hpp"

namespace flowagent::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string log_level = "warn";
  // config key -> value from the dedicated controller flags; applied after --set
  std::vector<std::pair<std::string, std::string>> controller_flags = {
      {"controllers.pre", ""},
      {"controllers.post", ""},
      {"controllers.max_identical_api_calls", ""},
      {"controllers.max_total_turns", ""},
      {"controllers.max_policy_retries_per_turn", ""},
      {"controllers.max_tool_calls_per_turn", ""},
  };
};

service::ServiceConfig load_config(const Globals& g) {
  service::ServiceConfig cfg;
  try {
    if (!g.config_path.empty()) cfg = service::load_config(g.config_path);
    for (const auto& kv : g.overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : g.controller_flags) {
      if (!value.empty()) cfg.set(key, value);
    }
  } catch (const service::ConfigError& e) {
    throw UsageError(g.config_path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::string join(const auto& items, const char* sep = ", ") {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : sep) + std::string(item);
  return out.empty() ? "-" : out;
}

void print_report(std::ostream& out, const service::RunResult& run) {
  out << service::report_json(run).dump(2) << "\n\n" << eval::render_markdown_table(std::span(&run.report, 1));
}

bool below(const std::optional<double>& value, std::optional<double> threshold) {
  return threshold && (!value || *value < *threshold);
}

// ---- validate ----

int cmd_validate(const std::string& file, bool as_json, std::ostream& out) {
  std::string source;
  try {
    source = agent::read_file(file);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const auto diagnostics = pdl::check_source(source);
  if (as_json) {
    out << pdl::to_json(diagnostics).dump(2) << "\n";
  } else {
    for (const auto& d : diagnostics) out << pdl::format_diagnostic(d, file) << "\n";
    const auto errors = std::count_if(diagnostics.begin(), diagnostics.end(),
                                      [](const pdl::Diagnostic& d) { return d.severity == pdl::Severity::Error; });
    out << errors << " error(s), " << diagnostics.size() - errors << " warning(s)\n";
  }
  return pdl::has_errors(diagnostics) ? kFailure : kOk;
}

// ---- chat ----

void print_state(std::ostream& out, const agent::SessionState& state, const control::ControllerConfig& cfg) {
  const auto access = pdl::accessible_nodes(state.workflow->graph, state.executed_set());
  std::vector<std::string> executed;
  for (const auto& [node, n] : state.executed) executed.push_back(node + " x" + std::to_string(n));
  std::vector<std::string> blocked;
  for (const auto& [node, unmet] : access.blocked) blocked.push_back(node);
  out << "  [executed: " << join(executed) << " | accessible: " << join(access.accessible)
      << " | blocked: " << join(blocked) << " | turn " << state.user_turns << "/" << cfg.max_total_turns << "]\n";
}

int cmd_chat(const std::string& file, const std::string& kind, const std::string& backend_spec,
             const service::ServiceConfig& cfg, std::istream& in, std::ostream& out) {
  auto workflow = agent::load_workflow_file(file);
  const auto spec = backend_spec.empty() ? cfg.agent_backend : backend_spec;
  if (spec.empty()) throw UsageError("no backend (--backend or agent.backend)");
  auto agent = service::make_configured_agent(kind.empty() ? cfg.agent_kind : kind, *workflow,
                                              service::make_backend(spec, cfg), cfg);
  const auto registry = service::load_registry(cfg, workflow->doc);
  auto state = agent::make_session("chat", workflow);
  agent::EventLog log;
  out << "Workflow " << workflow->doc.name << " (" << agent.kind << ", " << agent.backend->identity()
      << "). Empty line or EOF quits.\n";
  std::string line;
  while (out << "USER: " << std::flush, std::getline(in, line)) {
    if (line.empty()) break;
    auto result = agent::handle_user_message(state, agent, registry, agent::UserMessage{line, std::nullopt}, &log);
    for (const auto& action : result.emitted) {
      if (auto text = agent::transcript_line(action); text && !std::holds_alternative<agent::UserMessage>(action)) {
        out << *text << "\n";
      }
    }
    print_state(out, state, agent.controllers);
    if (result.session_ended) break;
  }
  return kOk;
}

// ---- serve ----

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& host, int port, const std::vector<std::string>& workflows,
              const std::string& data_dir, const service::ServiceConfig& cfg, std::ostream& out) {
  service::ServerOptions options;
  options.config = cfg;
  options.data_dir = data_dir;
  service::Server server(std::move(options));
  for (const auto& file : workflows) {
    out << "registered " << file << " as " << server.register_workflow(agent::read_file(file)) << "\n";
  }
  const int bound = server.bind(host, port);
  if (bound < 0) {
    spdlog::error("cannot bind {}:{}", host, port);
    return kFailure;
  }
  out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow agent engine: PDL validation, chat, simulation, evaluation and serving."};
  app.name("flowagent");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "override a config key (key=value); repeatable");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off");
  for (auto& [key, value] : g.controller_flags) {
    std::string flag = "--" + key.substr(key.find('.') + 1);
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option(flag, value, "controller override (" + key + ")")->group("Controllers");
  }

  std::string file;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate", "check a PDL file; exit 0 iff there are no errors");
  validate->add_option("file", file, "PDL file")->required();
  validate->add_flag("--json", as_json, "print diagnostics as JSON");

  std::string agent_kind;
  std::string backend;
  auto* chat = app.add_subcommand("chat", "interactive session on stdin/stdout");
  chat->add_option("file", file, "PDL file")->required()->check(CLI::ExistingFile);
  chat->add_option("--agent", agent_kind, "flowagent, react-nl, react-code, react-fc");
  chat->add_option("--backend", backend, "scripted:<file> or openai");

  service::SimulateOptions sim;
  std::string oow_kind;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "simulated-user sessions written to a run directory");
  simulate->add_option("file", file, "PDL file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--sessions", sim.sessions, "number of sessions")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "run seed");
  simulate->add_option("--oow-prob", sim.oow_prob, "per-turn OOW probability")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--oow-kind", oow_kind, "fix the OOW kind (default: rotate per session)");
  simulate->add_option("--profile", sim.profile, "user profile (.json or markdown)")->check(CLI::ExistingFile);
  simulate->add_option("--agent", sim.agent_kind, "agent kind");
  simulate->add_option("--out", out_dir, "run directory (default runs/<timestamp>)");

  auto* evaluate = app.add_subcommand("evaluate", "turn-level or session-level evaluation");
  evaluate->require_subcommand(1);
  service::TurnEvalOptions turn_opts;
  std::optional<double> min_pass_rate;
  auto* eval_turn = evaluate->add_subcommand("turn", "replay reference prefixes and score each BOT turn");
  eval_turn->add_option("--reference", turn_opts.reference, "reference sessions (.jsonl or transcript text)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_turn->add_option("--agent", turn_opts.agent_kind, "agent kind");
  eval_turn->add_option("--workflow", turn_opts.workflow, "PDL file")->required()->check(CLI::ExistingFile);
  eval_turn->add_option("--backend", turn_opts.backend, "agent backend (echo replays the reference)");
  eval_turn->add_option("--out", out_dir, "write report and manifest here");
  eval_turn->add_option("--min-pass-rate", min_pass_rate, "exit 1 when the overall pass rate is lower");

  service::SessionEvalOptions session_opts;
  std::optional<double> min_success_rate;
  auto* eval_session = evaluate->add_subcommand("session", "score simulated sessions");
  eval_session->add_option("--transcripts", session_opts.transcripts, "run directory or sessions/ directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_session->add_option("--workflow", session_opts.workflow, "PDL file (default: from the run manifest)");
  eval_session->add_option("--out", out_dir, "write report and manifest here");
  eval_session->add_option("--min-success-rate", min_success_rate, "exit 1 when the success rate is lower");

  std::string runs_dir;
  auto* report = app.add_subcommand("report", "comparison table over every report.json below a directory");
  report->add_option("--runs", runs_dir, "directory of runs")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--json", as_json, "print the reports as a JSON array");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> workflows;
  std::string data_dir;
  auto* serve = app.add_subcommand("serve", "HTTP API for live sessions");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)");
  serve->add_option("--workflow", workflows, "PDL file to register; repeatable")->check(CLI::ExistingFile);
  serve->add_option("--data-dir", data_dir, "persist session event logs here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    if (*validate) return cmd_validate(file, as_json, out);
    const auto cfg = load_config(g);
    if (*chat) return cmd_chat(file, agent_kind, backend, cfg, in, out);
    if (*simulate) {
      sim.workflow = file;
      if (!oow_kind.empty()) {
        sim.oow_kind = agent::parse_oow_kind(oow_kind);
        if (!sim.oow_kind) throw UsageError("unknown OOW kind '" + oow_kind + "'");
      }
      sim.out_dir = out_dir.empty() ? fs::path("runs") / service::utc_timestamp() : fs::path(out_dir);
      auto run = service::simulate_run(sim, cfg);
      out << "run " << run.manifest.run_id << " written to " << run.dir.string() << "\n\n"
          << eval::render_markdown_table(std::span(&run.report, 1));
      return kOk;
    }
    if (*eval_turn) {
      turn_opts.out_dir = out_dir;
      auto run = service::evaluate_turn_run(turn_opts, cfg);
      print_report(out, run);
      return below(run.report.metrics.overall.pass_rate, min_pass_rate) ? kFailure : kOk;
    }
    if (*eval_session) {
      session_opts.out_dir = out_dir;
      auto run = service::evaluate_session_run(session_opts, cfg);
      print_report(out, run);
      return below(run.report.metrics.overall.success_rate, min_success_rate) ? kFailure : kOk;
    }
    if (*report) {
      const auto reports = eval::load_reports(runs_dir);
      if (reports.empty()) {
        err << "no report.json found below " << runs_dir << "\n";
        return kFailure;
      }
      if (as_json) {
        agent::Json list = agent::Json::array();
        for (const auto& r : reports) list.push_back(eval::to_json(r));
        out << list.dump(2) << "\n";
      } else {
        out << eval::render_markdown_table(reports);
      }
      return kOk;
    }
    if (*serve) return cmd_serve(host, port, workflows, data_dir, cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const pdl::InvalidDocument& e) {
    for (const auto& d : e.diagnostics()) err << pdl::format_diagnostic(d) << "\n";
    return kFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace flowagent::cli
