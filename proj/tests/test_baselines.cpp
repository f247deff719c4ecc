#include <gtest/gtest.h>

#include "flowagent/agent/runtime.hpp"
#include "flowagent/agent/workflow.hpp"
#include "flowagent/baselines/formats.hpp"
#include "flowagent/baselines/react.hpp"
#include "support.hpp"

using namespace flowagent;
using namespace flowagent::baselines;
using flowagent::testing::fixture;

namespace {

std::shared_ptr<const agent::Workflow> hospital() {
  static auto wf = agent::load_workflow_file(fixture("hospital_appointment.pdl"));
  return wf;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(Formats, FlowchartHasPreconditionEdges) {
  auto fc = render_flowchart(hospital()->doc);
  EXPECT_EQ(fc.format, WorkflowFormat::Flowchart);
  EXPECT_TRUE(fc.text.starts_with("flowchart TD\n"));
  EXPECT_TRUE(contains(fc.text, "    check_hospital --> check_department\n"));
  EXPECT_TRUE(contains(fc.text, "    query_appointment --> register_hospital\n"));
  EXPECT_FALSE(contains(fc.text, "register_hospital --> query_appointment"));
  // every precondition edge appears exactly once
  std::size_t edges = 0;
  for (std::size_t pos = 0; (pos = fc.text.find(" --> ", pos)) != std::string::npos; ++pos) ++edges;
  std::size_t expected = 0;
  for (const auto& [node, pre] : hospital()->graph.edges()) expected += pre.size();
  EXPECT_EQ(edges, expected);
  EXPECT_TRUE(contains(fc.text, "-.->|\"hospital_exists == false\"| hospital_not_found"));
}

TEST(Formats, CodeHasOneStubPerApi) {
  auto code = render_code(hospital()->doc);
  EXPECT_TRUE(contains(code.text,
                       "def register_hospital(id_number, appointment_type, hospital_name, department_name, "
                       "appointment_time):\n    \"\"\"Returns: appointment_status. Requires: query_appointment.\"\"\"\n"));
  for (const auto& api : hospital()->doc.api_nodes) EXPECT_TRUE(contains(code.text, "def " + api.name + "(")) << api.name;
  EXPECT_TRUE(contains(code.text, "def procedure():\n    [hospital_exists] = API.check_hospital([hospital_name])\n"));
}

TEST(Formats, NlNumbersStepsAndListsNodes) {
  auto nl = render_nl(hospital()->doc);
  EXPECT_TRUE(contains(nl.text, "1. Call the API check_hospital with hospital_name to obtain hospital_exists.\n"));
  EXPECT_TRUE(contains(nl.text, "2.3.3.1. Call the API register_hospital"));
  EXPECT_TRUE(contains(nl.text, "- API register_hospital Inputs:"));
  EXPECT_TRUE(contains(nl.text, "Only after: query_appointment."));
}

TEST(Formats, SingleNodeWorkflow) {
  auto wf = agent::load_workflow("Name: Ping\nDesc: Pings.\nAPIs:\n  - name: ping\nANSWERs: []\nProcedure: |\n  API.ping()\n");
  auto nl = render_nl(wf->doc);
  EXPECT_TRUE(contains(nl.text, "1. Call the API ping.\n"));
  EXPECT_FALSE(contains(nl.text, "2."));
  auto fc = render_flowchart(wf->doc);
  EXPECT_FALSE(contains(fc.text, "-->"));
  EXPECT_TRUE(contains(render_code(wf->doc).text, "def ping():"));
}

TEST(Formats, DispatchMatchesDirectCalls) {
  const auto& doc = hospital()->doc;
  EXPECT_EQ(render_workflow(doc, WorkflowFormat::NL), render_nl(doc));
  EXPECT_EQ(render_workflow(doc, WorkflowFormat::Code), render_code(doc));
  EXPECT_EQ(render_workflow(doc, WorkflowFormat::Flowchart), render_flowchart(doc));
  EXPECT_STREQ(to_string(WorkflowFormat::Flowchart), "flowchart");
}

TEST(Formats, RenderingIsDeterministic) {
  auto again = agent::load_workflow_file(fixture("hospital_appointment.pdl"));
  for (auto f : {WorkflowFormat::NL, WorkflowFormat::Code, WorkflowFormat::Flowchart, WorkflowFormat::PDL}) {
    EXPECT_EQ(render_workflow(hospital()->doc, f), render_workflow(again->doc, f));
  }
}

TEST(AgentKinds, NamesAndDefaults) {
  for (auto kind : {AgentKind::FlowAgent, AgentKind::ReactNl, AgentKind::ReactCode, AgentKind::ReactFc}) {
    EXPECT_EQ(parse_agent_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_agent_kind("react-yaml").has_value());
  auto backend = agent::ScriptedBackend::from_strings({});
  auto flow = make_agent(AgentKind::FlowAgent, hospital()->doc, backend);
  auto react = make_agent(AgentKind::ReactFc, hospital()->doc, backend);
  EXPECT_EQ(flow.controllers, control::ControllerConfig::all_enabled());
  EXPECT_EQ(react.controllers, control::ControllerConfig::all_disabled());
  EXPECT_EQ(react.kind, "react-fc");
}

TEST(ReactPrompt, EmbedsChosenFormat) {
  auto backend = agent::ScriptedBackend::from_strings({});
  auto registry = agent::ToolRegistry::from_document(hospital()->doc);
  auto state = agent::make_session("s", hospital());
  for (auto [kind, marker] : {std::pair{AgentKind::ReactFc, "flowchart TD"},
                              std::pair{AgentKind::ReactCode, "def procedure():"},
                              std::pair{AgentKind::ReactNl, "Steps:"}}) {
    auto a = make_agent(kind, hospital()->doc, backend);
    auto prompt = a.prompt->build({state, {}, {}, registry});
    EXPECT_TRUE(contains(prompt, marker)) << to_string(kind);
    EXPECT_TRUE(contains(prompt, kDefaultCurrentTime));
  }
}

// Same policy outputs, with and without controllers: FlowAgent vetoes the
// early registration, the ReAct baseline executes it.
TEST(ReactVsFlowAgent, PairedVeto) {
  const std::vector<std::string> outputs = {
      "Thought: register now\nAction: register_hospital\nAction Input: {\"id_number\": \"1\", \"appointment_type\": "
      "\"general\", \"hospital_name\": \"A\", \"department_name\": \"B\", \"appointment_time\": \"C\"}",
      "Thought: ok\nResponse: Done.",
      "Thought: ok\nResponse: Done.",
  };
  auto registry = agent::ToolRegistry::from_document(hospital()->doc);
  for (auto kind : {AgentKind::FlowAgent, AgentKind::ReactNl}) {
    auto a = make_agent(kind, hospital()->doc, agent::ScriptedBackend::from_strings(outputs));
    auto state = agent::make_session("s", hospital());
    auto r = agent::handle_user_message(state, a, registry, agent::UserMessage{"book me in", std::nullopt});
    auto violations = agent::find_violations(state.history, hospital()->graph);
    if (kind == AgentKind::FlowAgent) {
      EXPECT_TRUE(violations.empty());
      EXPECT_EQ(state.executed_count("register_hospital"), 0);
    } else {
      ASSERT_EQ(violations.size(), 1u);
      EXPECT_EQ(violations[0].node, "register_hospital");
    }
    EXPECT_EQ(r.response.text, "Done.");
  }
}
