#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "flowagent/agent/workflow.hpp"
#include "support.hpp"

using flowagent::testing::fixture;
using flowagent::testing::scratch_dir;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& stdin_text = {}) {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  Outcome o;
  o.code = flowagent::cli::run(args, in, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::filesystem::path write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

const char* kCyclic =
    "Name: Loop\n"
    "Desc: Two steps that wait for each other.\n"
    "APIs:\n"
    "  - name: a\n"
    "    precondition: [b]\n"
    "  - name: b\n"
    "    precondition: [a]\n"
    "ANSWERs: []\n"
    "Procedure: |\n"
    "  API.a()\n"
    "  API.b()\n";

std::vector<std::string> happy_simulate(const std::filesystem::path& out) {
  return {"--config", fixture("happy_path/flowagent.cfg").string(), "simulate",
          fixture("hospital_appointment.pdl").string(), "--sessions", "2", "--seed", "7", "--out", out.string()};
}

}  // namespace

TEST(Cli, ValidateGoodFile) {
  auto r = run({"validate", fixture("hospital_appointment.pdl").string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(contains(r.out, "0 error(s)"));
}

TEST(Cli, ValidateCycleExitsOne) {
  auto file = write(scratch_dir("cli_cycle") / "loop.pdl", kCyclic);
  auto r = run({"validate", file.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "cycle")) << r.out;
  auto j = run({"validate", "--json", file.string()});
  EXPECT_EQ(j.code, 1);
  auto diags = nlohmann::json::parse(j.out);
  ASSERT_TRUE(diags.is_array());
  EXPECT_FALSE(diags.empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"validate", "/nonexistent/file.pdl"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--set", "no_equals", "simulate", fixture("hospital_appointment.pdl").string()}).code, 2);
  EXPECT_EQ(run({"--max-total-turns", "lots", "simulate", fixture("hospital_appointment.pdl").string()}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, HelpListsControllerFlags) {
  auto r = run({"--help"});
  for (const char* flag : {"--pre", "--post", "--max-identical-api-calls", "--max-total-turns",
                           "--max-policy-retries-per-turn", "--max-tool-calls-per-turn"}) {
    EXPECT_TRUE(contains(r.out, flag)) << flag;
  }
}

TEST(Cli, SimulateTwiceGivesIdenticalTranscripts) {
  auto base = scratch_dir("cli_sim");
  auto a = run(happy_simulate(base / "a"));
  auto b = run(happy_simulate(base / "b"));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* name : {"session_000.transcript.jsonl", "session_001.transcript.jsonl"}) {
    EXPECT_EQ(flowagent::agent::read_file(base / "a" / "sessions" / name),
              flowagent::agent::read_file(base / "b" / "sessions" / name));
  }
  EXPECT_TRUE(contains(a.out, "| 1.0000 |")) << a.out;

  // same results through evaluate session, with a threshold
  auto s = run({"--config", fixture("happy_path/flowagent.cfg").string(), "evaluate", "session", "--transcripts",
                (base / "a").string(), "--min-success-rate", "1.0"});
  EXPECT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(nlohmann::json::parse(s.out.substr(0, s.out.find("\n\n"))).at("metrics").at("overall").at("success_rate"),
            1.0);

  auto rep = run({"report", "--runs", base.string()});
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_TRUE(contains(rep.out, "| Success Rate (All) |")) << rep.out;
}

TEST(Cli, ControllerFlagsOverrideConfig) {
  // one user turn allowed: the second user turn ends the session early
  auto base = scratch_dir("cli_flags");
  auto limited = happy_simulate(base / "short");
  limited.insert(limited.begin(), {"--max-total-turns", "1"});
  auto r = run(limited);
  ASSERT_EQ(r.code, 0) << r.err;
  auto meta = nlohmann::json::parse(flowagent::agent::read_file(base / "short" / "sessions" / "session_000.meta.json"));
  EXPECT_EQ(meta.at("end_reason"), "conversation_length") << meta.dump();
}

TEST(Cli, EvaluateTurnEcho) {
  auto r = run({"evaluate", "turn", "--reference", fixture("apartment_viewing_b1.jsonl").string(), "--workflow",
                fixture("apartment_viewing.pdl").string(), "--backend", "echo", "--min-pass-rate", "1.0"});
  EXPECT_EQ(r.code, 0) << r.err;
  auto report = nlohmann::json::parse(r.out.substr(0, r.out.find("\n\n")));
  EXPECT_EQ(report.at("metrics").at("overall").at("pass_rate"), 1.0);
  EXPECT_EQ(report.at("metrics").at("overall").at("tool_f1"), 1.0);
}

TEST(Cli, ChatOnScriptedBackend) {
  auto dir = scratch_dir("cli_chat");
  write(dir / "agent.json",
        R"({"responses": ["Thought: greet\nResponse: Which hospital?"]})");
  auto r = run({"chat", fixture("hospital_appointment.pdl").string(), "--backend", "scripted:" + (dir / "agent.json").string()},
               "hello\n\n");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "BOT: Which hospital?")) << r.out;
  EXPECT_TRUE(contains(r.out, "blocked: check_department, query_appointment")) << r.out;
}
