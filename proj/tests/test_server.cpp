#include <gtest/gtest.h>

#include <condition_variable>
#include <future>
#include <thread>

#include <httplib.h>

#include "flowagent/agent/backend.hpp"
#include "flowagent/agent/workflow.hpp"
#include "flowagent/eval/oow.hpp"
#include "flowagent/service/server.hpp"
#include "support.hpp"

using namespace flowagent;
using flowagent::testing::fixture;
using Json = nlohmann::json;

namespace {

const char* kEarlyRegistration =
    "Thought: skip ahead\nAction: register_hospital\nAction Input: {\"id_number\": \"1\", \"appointment_type\": "
    "\"general\", \"hospital_name\": \"A\", \"department_name\": \"B\", \"appointment_time\": \"C\"}";
const char* kCheckHospital =
    "Thought: check first\nAction: check_hospital\nAction Input: {\"hospital_name\": \"Peking Union Medical College "
    "Hospital\"}";

// Gate for the blocking backend: the first call parks until released.
struct Gate {
  std::mutex m;
  std::condition_variable cv;
  bool entered = false;
  bool released = false;

  void enter_and_wait() {
    std::unique_lock lock(m);
    entered = true;
    cv.notify_all();
    cv.wait(lock, [&] { return released; });
  }
  void wait_entered() {
    std::unique_lock lock(m);
    cv.wait(lock, [&] { return entered; });
  }
  void release() {
    std::lock_guard lock(m);
    released = true;
    cv.notify_all();
  }
};

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    gate = std::make_shared<Gate>();
    service::ServerOptions options;
    options.config.agent_backend = "veto-then-check";
    data_dir = flowagent::testing::scratch_dir("server_data");
    options.data_dir = data_dir;
    options.backend_factory = [g = gate, this](const std::string& spec) -> std::shared_ptr<agent::LlmBackend> {
      if (spec == "veto-then-check") {
        return agent::ScriptedBackend::from_strings(
            {kEarlyRegistration, kCheckHospital, "Thought: done\nResponse: Which department?"});
      }
      if (spec == "blocking") {
        return std::make_shared<agent::FunctionBackend>(
            [g](const std::vector<agent::ChatMessage>&, const agent::CompletionParams&) {
              g->enter_and_wait();
              return std::string("Thought: done\nResponse: Sorry for the wait.");
            },
            "blocking");
      }
      if (spec == "user") {
        return std::make_shared<agent::FunctionBackend>(
            [this](const std::vector<agent::ChatMessage>& messages, const agent::CompletionParams&) {
              std::lock_guard lock(user_mutex);
              user_prompts.push_back(messages.back().content);
              return std::string("Response: I want to see a doctor at Peking Union Medical College Hospital.");
            },
            "user");
      }
      throw std::invalid_argument("unknown backend " + spec);
    };
    server = std::make_unique<service::Server>(std::move(options));
    port = server->bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    thread = std::thread([this] { server->listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(10, 0);
  }

  void TearDown() override {
    gate->release();
    server->stop();
    if (thread.joinable()) thread.join();
  }

  httplib::Result post(const std::string& path, const Json& body) {
    return client->Post(path, body.dump(), "application/json");
  }

  static Json body(const httplib::Result& r) { return Json::parse(r->body); }

  std::string register_hospital() {
    auto r = post("/workflows", Json{{"pdl", agent::read_file(fixture("hospital_appointment.pdl"))}});
    EXPECT_TRUE(r->status == 201 || r->status == 200) << r->body;
    return body(r).at("id").get<std::string>();
  }

  std::string open_session(const Json& extra = Json::object()) {
    Json req{{"workflow_id", register_hospital()}};
    req.update(extra);
    auto r = post("/sessions", req);
    EXPECT_EQ(r->status, 201) << r->body;
    return body(r).at("session_id").get<std::string>();
  }

  std::shared_ptr<Gate> gate;
  std::filesystem::path data_dir;
  std::mutex user_mutex;
  std::vector<std::string> user_prompts;
  std::unique_ptr<service::Server> server;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
};

}  // namespace

TEST_F(ServerTest, ValidateEndpoint) {
  auto ok = post("/workflows/validate", Json{{"pdl", agent::read_file(fixture("hospital_appointment.pdl"))}});
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  EXPECT_EQ(body(ok).at("ok"), true);
  EXPECT_TRUE(body(ok).at("errors").empty());

  auto bad = post("/workflows/validate", Json{{"pdl", agent::read_file(fixture("hospital_appointment_verbatim.pdl"))}});
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(body(bad).at("ok"), false);
  ASSERT_EQ(body(bad).at("errors").size(), 1u);

  auto plain = client->Post("/workflows/validate", agent::read_file(fixture("apartment_viewing.pdl")), "text/plain");
  EXPECT_EQ(plain->status, 200);
  EXPECT_EQ(post("/workflows/validate", Json::object())->status, 400);
  EXPECT_EQ(client->Post("/workflows/validate", "{not json", "application/json")->status, 400);
}

TEST_F(ServerTest, RegisterAndListWorkflows) {
  auto r = post("/workflows", Json{{"pdl", agent::read_file(fixture("hospital_appointment.pdl"))}});
  EXPECT_EQ(r->status, 201);
  const auto summary = body(r);
  EXPECT_EQ(summary.at("nodes").size(), 15u);
  EXPECT_TRUE(std::find(summary.at("edges").begin(), summary.at("edges").end(),
                        Json{{"from", "check_hospital"}, {"to", "check_department"}}) != summary.at("edges").end());
  EXPECT_EQ(post("/workflows", Json{{"pdl", agent::read_file(fixture("hospital_appointment.pdl"))}})->status, 200);

  auto bad = post("/workflows", Json{{"pdl", "Name: x\n"}});
  EXPECT_EQ(bad->status, 422);
  EXPECT_FALSE(body(bad).at("diagnostics").empty());

  auto list = client->Get("/workflows");
  EXPECT_EQ(list->status, 200);
  ASSERT_EQ(body(list).at("workflows").size(), 1u);
  EXPECT_EQ(body(list).at("workflows")[0].at("id"), summary.at("id"));
}

TEST_F(ServerTest, SessionsAndNotFound) {
  EXPECT_EQ(post("/sessions", Json{{"workflow_id", "nope"}})->status, 404);
  EXPECT_EQ(post("/sessions/s9999/messages", Json{{"text", "hi"}})->status, 404);
  EXPECT_EQ(client->Get("/sessions/s9999/state")->status, 404);
  EXPECT_EQ(client->Get("/sessions/s9999/events?format=json")->status, 404);
  EXPECT_EQ(post("/sessions/s9999/oow", Json{{"kind", "intent_switching"}})->status, 404);
  EXPECT_EQ(post("/sessions/s9999/advance", Json::object())->status, 404);

  const auto wf = register_hospital();
  EXPECT_EQ(post("/sessions", Json{{"workflow_id", wf}, {"agent", "react-yaml"}})->status, 422);
  EXPECT_EQ(post("/sessions", Json{{"workflow_id", wf}, {"controllers", {{"speed", 1}}}})->status, 422);

  auto id = open_session();
  EXPECT_EQ(post("/sessions/" + id + "/messages", Json::object())->status, 400);
  auto state = client->Get("/sessions/" + id + "/state");
  EXPECT_EQ(state->status, 200);
  EXPECT_EQ(body(state).at("user_turns"), 0);
  EXPECT_EQ(body(state).at("agent"), "flowagent");
  EXPECT_EQ(body(state).at("accessible").size(), 10u);  // check_hospital plus the nine answers
}

// Event projection: the vetoed call shows up as controller feedback, the
// executed node unlocks its dependant.
TEST_F(ServerTest, MessageProjectsOntoState) {
  auto id = open_session();
  auto r = post("/sessions/" + id + "/messages", Json{{"text", "Book me in at Peking Union."}});
  ASSERT_EQ(r->status, 200) << r->body;
  const auto out = body(r);
  EXPECT_EQ(out.at("response").at("text"), "Which department?");
  EXPECT_EQ(out.at("session_ended"), false);
  const auto& state = out.at("state");
  EXPECT_EQ(state.at("executed"), (Json{{"check_hospital", 1}}));
  const auto& accessible = state.at("accessible");
  EXPECT_TRUE(std::find(accessible.begin(), accessible.end(), "check_department") != accessible.end());
  for (const auto& b : state.at("blocked")) EXPECT_NE(b.at("node"), "check_department");

  auto events = client->Get("/sessions/" + id + "/events?format=json");
  ASSERT_EQ(events->status, 200);
  const auto page0 = body(events);
  std::vector<std::string> types;
  for (const auto& e : page0.at("events")) types.push_back(e.at("type"));
  ASSERT_FALSE(types.empty());
  EXPECT_EQ(types.front(), "user_message");
  auto feedback = std::find(types.begin(), types.end(), "controller_feedback");
  ASSERT_NE(feedback, types.end());
  auto result = std::find(types.begin(), types.end(), "tool_result");
  ASSERT_NE(result, types.end());
  EXPECT_LT(feedback, result);
  EXPECT_EQ(types.back(), "bot_response");
  // the vetoed registration never reached the tool layer
  for (const auto& e : page0.at("events")) {
    if (e.at("type") == "tool_call") {
      EXPECT_EQ(e.at("payload").at("name"), "check_hospital");
    }
  }

  const auto next = page0.at("next").get<int>();
  EXPECT_EQ(next, static_cast<int>(types.size()));
  auto page = client->Get("/sessions/" + id + "/events?format=json&since=" + std::to_string(next - 1));
  ASSERT_EQ(body(page).at("events").size(), 1u);
  EXPECT_EQ(body(page).at("events")[0].at("type"), "bot_response");
  EXPECT_EQ(client->Get("/sessions/" + id + "/events?format=json&since=x")->status, 400);
}

TEST_F(ServerTest, EventStreamReplaysBacklog) {
  auto id = open_session();
  ASSERT_EQ(post("/sessions/" + id + "/messages", Json{{"text", "hello"}})->status, 200);
  auto sse = client->Get("/sessions/" + id + "/events?follow=0");
  ASSERT_TRUE(sse);
  EXPECT_EQ(sse->status, 200);
  EXPECT_TRUE(sse->get_header_value("Content-Type").starts_with("text/event-stream"));
  EXPECT_TRUE(sse->body.starts_with("id: 0\nevent: user_message\ndata: {")) << sse->body;
  EXPECT_NE(sse->body.find("event: controller_feedback\n"), std::string::npos);
  auto tail = client->Get("/sessions/" + id + "/events?follow=0&since=1");
  EXPECT_TRUE(tail->body.starts_with("id: 1\n")) << tail->body;
}

TEST_F(ServerTest, SecondMessageWhileInFlightIs409) {
  auto id = open_session({{"backend", "blocking"}});
  auto first = std::async(std::launch::async, [&] {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    auto r = c.Post("/sessions/" + id + "/messages", Json{{"text", "first"}}.dump(), "application/json");
    return r ? r->status : -1;
  });
  gate->wait_entered();
  auto second = post("/sessions/" + id + "/messages", Json{{"text", "second"}});
  EXPECT_EQ(second->status, 409);
  EXPECT_TRUE(body(second).contains("error"));
  auto state = client->Get("/sessions/" + id + "/state");
  EXPECT_EQ(body(state).at("in_flight"), true);
  EXPECT_EQ(body(state).at("user_turns"), 0);  // the in-flight turn is not visible yet
  gate->release();
  EXPECT_EQ(first.get(), 200);
  state = client->Get("/sessions/" + id + "/state");
  EXPECT_EQ(body(state).at("in_flight"), false);
  EXPECT_EQ(body(state).at("user_turns"), 1);
}

TEST_F(ServerTest, OowAndAdvance) {
  auto plain = open_session();
  EXPECT_EQ(post("/sessions/" + plain + "/oow", Json{{"kind", "intent_switching"}})->status, 422);
  EXPECT_EQ(post("/sessions/" + plain + "/advance", Json::object())->status, 422);

  auto id = open_session({{"user_backend", "user"}, {"profile", fixture("profile_michael.json").string()}});
  EXPECT_EQ(post("/sessions/" + id + "/oow", Json{{"kind", "time_travel"}})->status, 422);
  EXPECT_EQ(post("/sessions/" + id + "/oow", Json::object())->status, 400);
  auto armed = post("/sessions/" + id + "/oow", Json{{"kind", "procedure_jumping"}});
  ASSERT_EQ(armed->status, 200) << armed->body;
  EXPECT_EQ(body(armed).at("armed"), "procedure_jumping");

  auto step = post("/sessions/" + id + "/advance", Json::object());
  ASSERT_EQ(step->status, 200) << step->body;
  const auto out = body(step);
  EXPECT_EQ(out.at("user"), "I want to see a doctor at Peking Union Medical College Hospital.");
  auto events = client->Get("/sessions/" + id + "/events?format=json");
  const auto first = body(events).at("events").at(0);
  EXPECT_EQ(first.at("type"), "user_message");
  EXPECT_EQ(first.at("payload").at("oow"), "procedure_jumping");
  EXPECT_EQ(out.at("state").at("armed_oow"), nullptr);
  EXPECT_EQ(out.at("state").at("user_turns"), 1);

  // the armed instruction reached only the first simulated-user prompt
  ASSERT_TRUE(post("/sessions/" + id + "/advance", Json::object()));
  std::lock_guard lock(user_mutex);
  ASSERT_EQ(user_prompts.size(), 2u);
  const auto instruction = eval::default_oow_instruction(agent::OowKind::ProcedureJumping);
  EXPECT_NE(user_prompts[0].find(instruction), std::string::npos);
  EXPECT_EQ(user_prompts[1].find(instruction), std::string::npos);
}

TEST_F(ServerTest, LengthLimitEndsSession) {
  auto id = open_session({{"controllers", {{"max_total_turns", 1}}}});
  ASSERT_EQ(post("/sessions/" + id + "/messages", Json{{"text", "one"}})->status, 200);
  auto second = post("/sessions/" + id + "/messages", Json{{"text", "two"}});
  ASSERT_EQ(second->status, 200);
  EXPECT_EQ(body(second).at("session_ended"), true);
  EXPECT_EQ(body(second).at("state").at("ended"), true);
  EXPECT_EQ(post("/sessions/" + id + "/messages", Json{{"text", "three"}})->status, 409);
  auto sse = client->Get("/sessions/" + id + "/events");  // follows, then closes because the session ended
  ASSERT_TRUE(sse);
  EXPECT_NE(sse->body.find("event: session_end\n"), std::string::npos);
}

// The persisted log carries exactly the streamed events, and folding its
// history events reproduces the state endpoint.
TEST_F(ServerTest, PersistedLogMatchesStreamAndState) {
  auto id = open_session();
  ASSERT_EQ(post("/sessions/" + id + "/messages", Json{{"text", "Book me in."}})->status, 200);
  const auto page = body(client->Get("/sessions/" + id + "/events?format=json"));
  const auto persisted = agent::read_event_log(data_dir / "sessions" / (id + ".events.jsonl"));
  ASSERT_EQ(persisted.size(), page.at("events").size());
  for (std::size_t i = 0; i < persisted.size(); ++i) {
    EXPECT_EQ(nlohmann::json::parse(agent::to_json(persisted[i]).dump()), page.at("events")[i]) << i;
  }

  auto wf = agent::load_workflow_file(fixture("hospital_appointment.pdl"));
  auto folded = agent::make_session(id, wf);
  for (const auto& e : persisted) {
    if (agent::is_history_event(e)) folded.apply(agent::action_from_json(e.payload));
  }
  const auto state = body(client->Get("/sessions/" + id + "/state"));
  Json executed = Json::object();
  for (const auto& [node, n] : folded.executed) executed[node] = n;
  EXPECT_EQ(state.at("executed"), executed);
  EXPECT_EQ(state.at("user_turns"), folded.user_turns);
}
