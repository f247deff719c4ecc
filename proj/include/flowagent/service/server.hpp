#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "flowagent/agent/backend.hpp"
#include "flowagent/service/config.hpp"

namespace flowagent::service {

using BackendFactory = std::function<std::shared_ptr<agent::LlmBackend>(const std::string& spec)>;

struct ServerOptions {
  ServiceConfig config;
  std::filesystem::path data_dir;  // session event logs go to data_dir/sessions/<id>.events.jsonl
  BackendFactory backend_factory;  // make_backend(spec, config) when unset
};

// HTTP API:
//   POST /workflows/validate          {"pdl"} -> 200 | 422 with diagnostics
//   GET  /workflows                   registered workflows with their DAGs
//   POST /workflows                   {"pdl"} -> 201 (200 when already registered) | 422
//   POST /sessions                    {"workflow_id", "agent"?, "backend"?, "controllers"?,
//                                      "user_backend"?, "profile"?} -> 201 {"session_id"}
//   POST /sessions/{id}/messages      {"text"} -> final BotResponse; 409 while a turn is in flight
//   GET  /sessions/{id}/state         executed / accessible / blocked nodes and counters
//   GET  /sessions/{id}/events        server-sent events; ?format=json&since=N for a JSON page,
//                                     ?follow=0 to close after the backlog
//   POST /sessions/{id}/oow           {"kind", "subtype"?} arms an OOW for the next simulated turn
//   POST /sessions/{id}/advance       runs one simulated-user turn
// Unknown workflows and sessions give 404. Errors carry {"error": "..."}.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Returns the workflow id. Throws pdl::InvalidDocument.
  std::string register_workflow(std::string source);

  // Binds `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); call bind() first.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flowagent::service
