#include "flowagent/service/server.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "flowagent/agent/workflow.hpp"
#include "flowagent/eval/oow.hpp"
#include "flowagent/eval/profile.hpp"
#include "flowagent/eval/user_sim.hpp"
#include "flowagent/pdl/graph.hpp"
#include "flowagent/pdl/validate.hpp"
#include "flowagent/service/agents.hpp"

namespace flowagent::service {

namespace fs = std::filesystem;
using agent::Json;

namespace {

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    auto j = Json::parse(req.body);
    if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw HttpError(400, std::string("invalid JSON body: ") + e.what());
  }
}

// The PDL text of a validate/register request: {"pdl": "..."} or a raw
// text/plain body.
std::string pdl_text(const httplib::Request& req) {
  if (req.get_header_value("Content-Type").starts_with("text/plain")) return req.body;
  auto body = parse_body(req);
  if (!body.contains("pdl") || !body.at("pdl").is_string()) throw HttpError(400, "missing string field 'pdl'");
  return body.at("pdl").get<std::string>();
}

struct WorkflowEntry {
  std::shared_ptr<const agent::Workflow> workflow;
};

struct LiveSession {
  std::string id;
  std::string workflow_id;
  std::shared_ptr<const agent::Workflow> workflow;
  agent::Agent agent;
  agent::ToolRegistry registry;
  std::unique_ptr<agent::EventLog> log;
  std::shared_ptr<agent::LlmBackend> user_backend;
  std::optional<eval::UserProfile> profile;

  std::mutex mutex;  // guards the fields below
  agent::SessionState state;
  bool ended = false;
  std::optional<agent::OowAnnotation> armed_oow;

  std::atomic<bool> in_flight{false};
};

// Clears the in-flight flag on scope exit.
struct InFlight {
  explicit InFlight(LiveSession& s) : session(s) {
    if (session.in_flight.exchange(true)) throw HttpError(409, "a turn is already in flight for this session");
  }
  ~InFlight() { session.in_flight = false; }
  LiveSession& session;
};

Json workflow_summary(const std::string& id, const agent::Workflow& wf) {
  Json nodes = Json::array();
  Json edges = Json::array();
  for (const auto* node : wf.doc.all_nodes()) {
    nodes.push_back(Json{{"name", node->name},
                         {"kind", pdl::to_string(node->kind)},
                         {"desc", node->desc ? Json(*node->desc) : Json(nullptr)},
                         {"preconditions", node->preconditions}});
    for (const auto& pre : node->preconditions) edges.push_back(Json{{"from", pre}, {"to", node->name}});
  }
  return Json{{"id", id},
              {"name", wf.doc.name},
              {"desc", wf.doc.desc},
              {"content_hash", wf.content_hash},
              {"nodes", nodes},
              {"edges", edges},
              {"warnings", pdl::to_json(wf.warnings)}};
}

// Caller holds session.mutex.
Json state_json(const LiveSession& s) {
  const auto executed = s.state.executed_set();
  const auto access = pdl::accessible_nodes(s.workflow->graph, executed);
  Json blocked = Json::array();
  for (const auto& [node, unmet] : access.blocked) blocked.push_back(Json{{"node", node}, {"requires", unmet}});
  Json counts = Json::object();
  for (const auto& [node, n] : s.state.executed) counts[node] = n;
  return Json{{"session_id", s.id},
              {"workflow_id", s.workflow_id},
              {"agent", s.agent.kind},
              {"executed", counts},
              {"accessible", access.accessible},
              {"blocked", blocked},
              {"user_turns", s.state.user_turns},
              {"max_total_turns", s.agent.controllers.max_total_turns},
              {"clock", s.state.clock},
              {"ended", s.ended},
              {"in_flight", s.in_flight.load()},
              {"simulated_user", s.user_backend != nullptr},
              {"armed_oow", s.armed_oow ? Json(agent::format_oow(*s.armed_oow)) : Json(nullptr)}};
}

bool ends_session(const std::vector<agent::Action>& emitted) {
  return std::any_of(emitted.begin(), emitted.end(),
                     [](const agent::Action& a) { return std::holds_alternative<agent::SessionEnd>(a); });
}

Json turn_json(const agent::TurnResult& result) {
  Json emitted = Json::array();
  for (const auto& a : result.emitted) emitted.push_back(agent::to_json(a));
  return Json{{"response", agent::to_json(agent::Action{result.response})},
              {"emitted", emitted},
              {"session_ended", result.session_ended}};
}

std::string sse_frame(const agent::Event& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + agent::to_json(e).dump() + "\n\n";
}

}  // namespace

struct Server::Impl {
  ServerOptions options;
  httplib::Server http;
  std::mutex mutex;  // guards workflows, sessions, next_session
  std::map<std::string, WorkflowEntry> workflows;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions;
  int next_session = 1;
  std::atomic<bool> stopping{false};

  explicit Impl(ServerOptions opts) : options(std::move(opts)) {
    if (!options.backend_factory) {
      options.backend_factory = [cfg = options.config](const std::string& spec) { return make_backend(spec, cfg); };
    }
    routes();
  }

  std::shared_ptr<LiveSession> session(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError(404, "unknown session '" + id + "'");
    return it->second;
  }

  std::string register_workflow(std::string source) {
    auto wf = agent::load_workflow(std::move(source));
    const auto id = wf->id();
    std::lock_guard lock(mutex);
    workflows.try_emplace(id, WorkflowEntry{std::move(wf)});
    return id;
  }

  // Wraps a handler so HttpError and unexpected exceptions become JSON errors.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, Json{{"error", e.what()}});
      } catch (const std::invalid_argument& e) {
        send_json(res, 422, Json{{"error", e.what()}});
      } catch (const Json::exception& e) {
        send_json(res, 400, Json{{"error", e.what()}});
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_json(res, 500, Json{{"error", e.what()}});
      }
    };
  }

  void routes() {
    http.Post("/workflows/validate", guarded([](const httplib::Request& req, httplib::Response& res) {
      const auto diagnostics = pdl::check_source(pdl_text(req));
      const bool ok = !pdl::has_errors(diagnostics);
      nlohmann::json errors = nlohmann::json::array();
      for (const auto& d : diagnostics) {
        if (d.severity == pdl::Severity::Error) errors.push_back(pdl::to_json(d));
      }
      send_json(res, ok ? 200 : 422, Json{{"ok", ok}, {"errors", errors}, {"diagnostics", pdl::to_json(diagnostics)}});
    }));

    http.Get("/workflows", guarded([this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      std::lock_guard lock(mutex);
      for (const auto& [id, entry] : workflows) list.push_back(workflow_summary(id, *entry.workflow));
      send_json(res, 200, Json{{"workflows", list}});
    }));

    http.Post("/workflows", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string id;
      bool existed = false;
      try {
        auto wf = agent::load_workflow(pdl_text(req));
        id = wf->id();
        std::lock_guard lock(mutex);
        existed = !workflows.try_emplace(id, WorkflowEntry{wf}).second;
      } catch (const pdl::InvalidDocument& e) {
        send_json(res, 422, Json{{"error", "invalid workflow"}, {"diagnostics", pdl::to_json(e.diagnostics())}});
        return;
      }
      std::lock_guard lock(mutex);
      send_json(res, existed ? 200 : 201, workflow_summary(id, *workflows.at(id).workflow));
    }));

    http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      create_session(parse_body(req), res);
    }));

    http.Post(R"(/sessions/([^/]+)/messages)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session(req.matches[1]);
      auto body = parse_body(req);
      if (!body.contains("text") || !body.at("text").is_string()) throw HttpError(400, "missing string field 'text'");
      InFlight guard(*s);
      agent::SessionState working;
      {
        std::lock_guard lock(s->mutex);
        if (s->ended) throw HttpError(409, "session has ended");
        working = s->state;
      }
      auto result = agent::handle_user_message(working, s->agent, s->registry,
                                               agent::UserMessage{body.at("text").get<std::string>(), std::nullopt},
                                               s->log.get());
      Json out = turn_json(result);
      std::lock_guard lock(s->mutex);
      s->state = std::move(working);
      s->ended = s->ended || result.session_ended || ends_session(result.emitted);
      out["state"] = state_json(*s);
      send_json(res, 200, out);
    }));

    http.Get(R"(/sessions/([^/]+)/state)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session(req.matches[1]);
      std::lock_guard lock(s->mutex);
      send_json(res, 200, state_json(*s));
    }));

    http.Get(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      stream_events(session(req.matches[1]), req, res);
    }));

    http.Post(R"(/sessions/([^/]+)/oow)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session(req.matches[1]);
      auto body = parse_body(req);
      if (!body.contains("kind") || !body.at("kind").is_string()) throw HttpError(400, "missing string field 'kind'");
      auto kind = agent::parse_oow_kind(body.at("kind").get<std::string>());
      if (!kind) throw HttpError(422, "unknown OOW kind '" + body.at("kind").get<std::string>() + "'");
      if (!s->user_backend) throw HttpError(422, "OOW steering needs a session with a simulated user");
      std::lock_guard lock(s->mutex);
      if (s->ended) throw HttpError(409, "session has ended");
      s->armed_oow = agent::OowAnnotation{*kind, body.value("subtype", "")};
      send_json(res, 200, Json{{"armed", agent::format_oow(*s->armed_oow)}});
    }));

    http.Post(R"(/sessions/([^/]+)/advance)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      advance(session(req.matches[1]), res);
    }));
  }

  void create_session(const Json& body, httplib::Response& res) {
    const auto& cfg = options.config;
    const auto workflow_id = body.value("workflow_id", "");
    std::shared_ptr<const agent::Workflow> wf;
    {
      std::lock_guard lock(mutex);
      auto it = workflows.find(workflow_id);
      if (it == workflows.end()) throw HttpError(404, "unknown workflow '" + workflow_id + "'");
      wf = it->second.workflow;
    }
    const auto kind = body.value("agent", cfg.agent_kind);
    const auto backend_spec = body.value("backend", cfg.agent_backend);
    if (backend_spec.empty()) throw HttpError(422, "no agent backend configured");
    ControllerOverrides overrides;
    if (body.contains("controllers")) overrides = controller_overrides_from_json(body.at("controllers"));

    auto s = std::make_shared<LiveSession>();
    s->workflow_id = workflow_id;
    s->workflow = wf;
    s->agent = make_configured_agent(kind, *wf, options.backend_factory(backend_spec), cfg, overrides);
    s->registry = load_registry(cfg, wf->doc);
    const auto user_spec = body.value("user_backend", cfg.user_backend);
    if (!user_spec.empty()) {
      s->user_backend = options.backend_factory(user_spec);
      if (body.contains("profile") && body.at("profile").is_object()) {
        s->profile = eval::profile_from_json(body.at("profile"));
      } else {
        const auto path = body.value("profile", cfg.user_profile);
        if (path.empty()) throw HttpError(422, "a simulated user needs a profile");
        s->profile = eval::load_profile(cfg.resolve(path));
      }
    }
    {
      std::lock_guard lock(mutex);
      char buf[32];
      std::snprintf(buf, sizeof buf, "s%04d", next_session++);
      s->id = buf;
      sessions.emplace(s->id, s);
    }
    if (!options.data_dir.empty()) {
      fs::create_directories(options.data_dir / "sessions");
      s->log = std::make_unique<agent::EventLog>(options.data_dir / "sessions" / (s->id + ".events.jsonl"));
    } else {
      s->log = std::make_unique<agent::EventLog>();
    }
    s->state = agent::make_session(s->id, wf);
    send_json(res, 201, Json{{"session_id", s->id}, {"workflow_id", workflow_id}, {"agent", s->agent.kind}});
  }

  void advance(const std::shared_ptr<LiveSession>& s, httplib::Response& res) {
    if (!s->user_backend || !s->profile) throw HttpError(422, "session has no simulated user");
    InFlight guard(*s);
    agent::SessionState working;
    std::optional<agent::OowAnnotation> armed;
    {
      std::lock_guard lock(s->mutex);
      if (s->ended) throw HttpError(409, "session has ended");
      working = s->state;
      armed = s->armed_oow;
    }
    Json out;
    bool ended = false;
    if (control::conversation_exhausted(working, s->agent.controllers)) {
      auto result = agent::close_session(working, s->agent, control::kConversationLength, s->log.get());
      out = turn_json(result);
      out["user"] = nullptr;
      ended = true;
    } else {
      std::optional<std::string> instruction;
      if (armed) instruction = eval::default_oow_instruction(armed->kind);
      auto reply = eval::simulate_user(*s->profile, working.workflow->doc.desc, working.history, *s->user_backend,
                                       instruction);
      if (reply.end) {
        agent::record(working, agent::SessionEnd{"user_end"}, s->log.get());
        out = Json{{"user", nullptr}, {"response", nullptr}, {"emitted", Json::array()}, {"session_ended", true}};
        ended = true;
      } else {
        auto result = agent::handle_user_message(working, s->agent, s->registry,
                                                 agent::UserMessage{reply.text, armed}, s->log.get());
        out = turn_json(result);
        out["user"] = reply.text;
        ended = result.session_ended || ends_session(result.emitted);
      }
    }
    std::lock_guard lock(s->mutex);
    s->state = std::move(working);
    s->ended = s->ended || ended;
    if (armed) s->armed_oow.reset();
    out["state"] = state_json(*s);
    send_json(res, 200, out);
  }

  void stream_events(const std::shared_ptr<LiveSession>& s, const httplib::Request& req, httplib::Response& res) {
    std::int64_t since = 0;
    if (req.has_param("since")) {
      try {
        since = std::stoll(req.get_param_value("since"));
      } catch (const std::exception&) {
        throw HttpError(400, "since must be an integer");
      }
    }
    if (req.get_param_value("format") == "json") {
      Json events = Json::array();
      std::int64_t next = since;
      for (const auto& e : s->log->since(since)) {
        events.push_back(agent::to_json(e));
        next = e.seq + 1;
      }
      send_json(res, 200, Json{{"events", events}, {"next", next}});
      return;
    }
    const bool follow = req.get_param_value("follow") != "0";
    auto next = std::make_shared<std::int64_t>(since);
    res.set_chunked_content_provider(
        "text/event-stream", [this, s, follow, next](std::size_t, httplib::DataSink& sink) {
          auto batch = follow ? s->log->wait_since(*next, std::chrono::milliseconds(250)) : s->log->since(*next);
          for (const auto& e : batch) {
            const auto frame = sse_frame(e);
            if (!sink.write(frame.data(), frame.size())) return false;
            *next = e.seq + 1;
          }
          bool ended;
          {
            std::lock_guard lock(s->mutex);
            ended = s->ended && !s->in_flight;
          }
          if (!follow || stopping || (ended && *next >= s->log->size())) sink.done();
          return true;
        });
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Server::~Server() { stop(); }

std::string Server::register_workflow(std::string source) { return impl_->register_workflow(std::move(source)); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  impl_->stopping = true;
  impl_->http.stop();
}

}  // namespace flowagent::service
