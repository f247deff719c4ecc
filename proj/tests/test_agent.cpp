#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "flowagent/agent/action.hpp"
#include "flowagent/agent/backend.hpp"
#include "flowagent/agent/events.hpp"
#include "flowagent/agent/labeler.hpp"
#include "flowagent/agent/output_parser.hpp"
#include "flowagent/agent/prompt.hpp"
#include "flowagent/agent/pyrepr.hpp"
#include "flowagent/agent/session.hpp"
#include "flowagent/agent/tools.hpp"
#include "flowagent/agent/workflow.hpp"
#include "support.hpp"

using namespace flowagent::agent;
using flowagent::testing::fixture;
using flowagent::testing::read_fixture;

namespace {

std::shared_ptr<const Workflow> hospital() {
  static auto wf = load_workflow_file(fixture("hospital_appointment.pdl"));
  return wf;
}

ToolCall call(std::string name, Json args = Json::object()) {
  ToolCall c;
  c.name = std::move(name);
  c.args = std::move(args);
  return c;
}

ToolResult ok_result(std::string name, Json payload = Json::object()) {
  ToolResult r;
  r.name = std::move(name);
  r.payload = std::move(payload);
  return r;
}

}  // namespace

TEST(PyRepr, RendersPythonLiterals) {
  Json v = Json::parse(R"({"RenterName": "Alex", "n": 15, "ok": true, "none": null, "l": [1.5, "it's"]})");
  EXPECT_EQ(to_pyrepr(v), R"({'RenterName': 'Alex', 'n': 15, 'ok': True, 'none': None, 'l': [1.5, "it's"]})");
}

TEST(PyRepr, ParsesAndPreservesKeyOrder) {
  auto v = parse_pyliteral("{'Status': 'Available', 'b': (1, 2), 'a': None, 'x': False, 'y': -2.5}");
  ASSERT_TRUE(v.is_object());
  std::vector<std::string> keys;
  for (const auto& [k, _] : v.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"Status", "b", "a", "x", "y"}));
  EXPECT_EQ(v["b"], Json::array({1, 2}));
  EXPECT_TRUE(v["a"].is_null());
  EXPECT_EQ(v["y"], -2.5);
  EXPECT_THROW(parse_pyliteral("{'a': }"), std::invalid_argument);
  EXPECT_THROW(parse_pyliteral("{'a': 1} trailing"), std::invalid_argument);
}

TEST(PyReprProperty, RoundTripsRandomValues) {
  std::mt19937_64 rng(3);
  std::function<Json(int)> gen = [&](int depth) -> Json {
    std::uniform_int_distribution<int> kind(0, depth > 2 ? 4 : 6);
    switch (kind(rng)) {
      case 0: return nullptr;
      case 1: return std::bernoulli_distribution(0.5)(rng);
      case 2: return std::uniform_int_distribution<int>(-1000, 1000)(rng);
      case 3: {
        std::string s;
        const std::string alphabet = "ab'\"\\ \n,:{}";
        for (int i = std::uniform_int_distribution<int>(0, 6)(rng); i > 0; --i)
          s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        return s;
      }
      case 4: return std::uniform_int_distribution<int>(0, 99)(rng) / 4.0;
      case 5: {
        Json arr = Json::array();
        for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i) arr.push_back(gen(depth + 1));
        return arr;
      }
      default: {
        Json obj = Json::object();
        for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i)
          obj["k" + std::to_string(std::uniform_int_distribution<int>(0, 9)(rng))] = gen(depth + 1);
        return obj;
      }
    }
  };
  for (int i = 0; i < 500; ++i) {
    Json v = gen(0);
    EXPECT_EQ(parse_pyliteral(to_pyrepr(v)), v) << to_pyrepr(v);
  }
}

TEST(Action, JsonRoundTripForEveryType) {
  std::vector<Action> actions = {
      UserMessage{"hi", OowAnnotation{OowKind::ProcedureJumping, "skip"}},
      BotResponse{"hello", "request_information", "think", false},
      call("check_hospital", Json{{"hospital_name", "X"}}),
      ok_result("check_hospital", Json{{"hospital_exists", true}}),
      ControllerFeedback{"node_dependency", "no"},
      SessionEnd{"user_end"},
  };
  for (const auto& a : actions) {
    auto j = to_json(a);
    EXPECT_EQ(j.at("type"), action_type(a));
    EXPECT_EQ(action_from_json(j), a);
  }
  EXPECT_THROW(action_from_json(Json{{"type", "nope"}}), std::invalid_argument);
}

TEST(Action, OowKindSpellings) {
  EXPECT_EQ(parse_oow_kind("intent_switching"), OowKind::IntentSwitching);
  EXPECT_EQ(parse_oow_kind("procedure-jumping"), OowKind::ProcedureJumping);
  EXPECT_EQ(parse_oow_kind("IrrelevantAnswering"), OowKind::IrrelevantAnswering);
  EXPECT_FALSE(parse_oow_kind("small_talk").has_value());
  auto oow = parse_oow("intent_switching/detail-switching");
  ASSERT_TRUE(oow);
  EXPECT_EQ(oow->subtype, "detail-switching");
  EXPECT_EQ(format_oow(*oow), "intent_switching/detail-switching");
}

TEST(Action, TranscriptLinesUseReferenceFormat) {
  ToolCall c = call("book_apartment_viewing", Json{{"RenterName", "Alex"}, {"StartTimeHour", "15"}});
  EXPECT_EQ(transcript_line(c), "BOT: <Call API> book_apartment_viewing({'RenterName': 'Alex', 'StartTimeHour': '15'})");
  EXPECT_EQ(transcript_line(ok_result("x", Json{{"Status", "Available"}})), "SYSTEM: {'Status': 'Available'}");
  EXPECT_EQ(transcript_line(UserMessage{"Hi", std::nullopt}), "USER: Hi");
  EXPECT_FALSE(transcript_line(ControllerFeedback{"a", "b"}).has_value());
  EXPECT_FALSE(transcript_line(SessionEnd{"x"}).has_value());
  EXPECT_EQ(canonical_args(Json{{"b", 1}, {"a", 2}}), canonical_args(Json{{"a", 2}, {"b", 1}}));
}

TEST(OutputParser, ResponseAndActionTemplates) {
  auto r = parse_llm_output("Thought: greet\nResponse: Hello there.\nAnswer: request_information");
  ASSERT_TRUE(std::holds_alternative<BotResponse>(r));
  EXPECT_EQ(std::get<BotResponse>(r).text, "Hello there.");
  EXPECT_EQ(std::get<BotResponse>(r).answer_node, "request_information");
  EXPECT_EQ(std::get<BotResponse>(r).thought, "greet");

  auto a = parse_llm_output("```\nThought: t\nAction: API_check_hospital\nAction Input: {\"hospital_name\": \"X\"}\n```");
  ASSERT_TRUE(std::holds_alternative<ToolCall>(a));
  EXPECT_EQ(std::get<ToolCall>(a).name, "check_hospital");
  EXPECT_EQ(std::get<ToolCall>(a).args, (Json{{"hospital_name", "X"}}));

  EXPECT_TRUE(std::holds_alternative<ParseError>(parse_llm_output("I will just chat.")));
  EXPECT_TRUE(std::holds_alternative<ParseError>(parse_llm_output("Action: x\nAction Input: {broken")));
}

TEST(OutputParser, RenderIsInverse) {
  BotResponse r{"Your appointment\nis booked.", "appointment_successful", "done", false};
  auto parsed = parse_llm_output(render_llm_output(r));
  ASSERT_TRUE(std::holds_alternative<BotResponse>(parsed));
  EXPECT_EQ(std::get<BotResponse>(parsed), r);

  ToolCall c = call("register_hospital", Json{{"id_number", "1"}, {"appointment_type", "general"}});
  c.thought = "register";
  auto parsed_call = parse_llm_output(render_llm_output(c));
  ASSERT_TRUE(std::holds_alternative<ToolCall>(parsed_call));
  EXPECT_EQ(std::get<ToolCall>(parsed_call), c);
}

TEST(Tools, TableLookupAndDefault) {
  auto registry = ToolRegistry::from_file(fixture("hospital_tools.json"), &hospital()->doc);
  EXPECT_TRUE(registry.missing_for(hospital()->doc).empty());
  auto hit = execute_tool(registry, call("check_hospital", Json{{"hospital_name", "Peking Union Medical College Hospital"}}), 0);
  EXPECT_TRUE(hit.ok);
  EXPECT_EQ(hit.payload, (Json{{"hospital_exists", true}}));
  auto miss = execute_tool(registry, call("check_hospital", Json{{"hospital_name", "Nowhere"}}), 0);
  EXPECT_TRUE(miss.ok);
  EXPECT_EQ(miss.payload, (Json{{"hospital_exists", false}}));
}

TEST(Tools, ApartmentAvailabilityAndErrors) {
  auto doc = load_workflow_file(fixture("apartment_viewing.pdl"));
  auto registry = ToolRegistry::from_json(nlohmann::json::parse(R"({
    "book_apartment_viewing": {
      "schema": {"optional": ["Message"]},
      "default": {"Status": "Available"},
      "failures": [{"on_call": 3, "error": "timeout"}]
    }})"),
                                          &doc->doc);
  Json args = {{"RenterName", "Alex"},      {"Name", "Maple Apartments"}, {"Day", "Friday"},
               {"StartTimeHour", "15"},     {"ApplicationFeePaid", "Yes"}, {"Message", ""},
               {"RequestType", "CheckAvailability"}};
  auto r = execute_tool(registry, call("book_apartment_viewing", args), 0);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.payload, (Json{{"Status", "Available"}}));

  Json without_message = args;
  without_message.erase("Message");
  EXPECT_TRUE(execute_tool(registry, call("book_apartment_viewing", without_message), 1).ok);

  Json without_day = args;
  without_day.erase("Day");
  auto missing = execute_tool(registry, call("book_apartment_viewing", without_day), 0);
  EXPECT_FALSE(missing.ok);
  EXPECT_EQ(missing.payload.at("error"), "MissingSlot");

  auto failed = execute_tool(registry, call("book_apartment_viewing", args), 2);
  EXPECT_FALSE(failed.ok);

  auto unknown = execute_tool(registry, call("teleport"), 0);
  EXPECT_FALSE(unknown.ok);

  std::vector<Action> history = {call("book_apartment_viewing", args), r, call("x"), ok_result("x")};
  EXPECT_EQ(prior_tool_calls(history, "book_apartment_viewing"), 1);
}

TEST(Tools, ExecutionIsPure) {
  auto registry = ToolRegistry::from_file(fixture("hospital_tools.json"), &hospital()->doc);
  auto c = call("query_appointment", Json{{"hospital_name", "A"}, {"department_name", "B"}, {"appointment_time", "C"}});
  EXPECT_EQ(execute_tool(registry, c, 0), execute_tool(registry, c, 0));
}

TEST(Prompt, RenderTemplate) {
  EXPECT_EQ(render_template("a {{x}} b {{ y | trim }}", {{"x", "1"}, {"y", "  2 \n"}}), "a 1 b 2");
  EXPECT_THROW(render_template("{{ missing }}", {}), std::invalid_argument);
}

TEST(Prompt, ToolSchemaAndApiInfos) {
  auto registry = ToolRegistry::from_file(fixture("hospital_tools.json"), &hospital()->doc);
  auto schema = tool_function_schema(registry.find("check_hospital")->schema);
  EXPECT_EQ(schema.at("name"), "check_hospital");
  EXPECT_EQ(schema.at("parameters").at("required"), Json::array({"hospital_name"}));
  auto infos = render_api_infos(registry, {{"register_hospital", {"query_appointment"}}});
  EXPECT_NE(infos.find("- check_hospital:"), std::string::npos);
  EXPECT_NE(infos.find("(blocked: requires query_appointment)"), std::string::npos);
}

TEST(Prompt, EmptyHistoryPlaceholder) {
  EXPECT_EQ(render_history({}), std::string(kEmptyHistory));
  std::vector<Action> history = {UserMessage{"hi", std::nullopt}, ControllerFeedback{"c", "hidden"}};
  std::vector<std::string> scratch = {"controller says no"};
  auto text = render_history(history, scratch);
  EXPECT_NE(text.find("USER: hi"), std::string::npos);
  EXPECT_EQ(text.find("hidden"), std::string::npos);
  EXPECT_NE(text.find("controller says no"), std::string::npos);
}

TEST(Labeler, TemplateOverlap) {
  TemplateOverlapClassifier classifier;
  const auto& doc = hospital()->doc;
  auto label = classifier.classify(
      "Your appointment at PUMCH Cardiology for Tuesday has been successful. A confirmation message will be "
      "sent to your phone number shortly. Is there anything else I can help you with?",
      doc);
  EXPECT_EQ(label, "appointment_successful");
  EXPECT_FALSE(classifier.classify("What is the weather like?", doc).has_value());
  EXPECT_DOUBLE_EQ(classifier.score("hello world", "hello $name world"), 1.0);
  EXPECT_DOUBLE_EQ(classifier.score("hello", "hello big world"), 1.0 / 3.0);
}

TEST(Labeler, ExplicitLabelWins) {
  TemplateOverlapClassifier classifier;
  EXPECT_EQ(label_answer_node("anything", std::string("made_up"), hospital()->doc, &classifier), "made_up");
  EXPECT_FALSE(label_answer_node("anything", std::nullopt, hospital()->doc, nullptr).has_value());
}

TEST(Labeler, LlmClassifierReadsAnswerLine) {
  auto backend = ScriptedBackend::from_strings({"Answer: hospital_not_found", "Answer: none"});
  LlmAnswerClassifier classifier(backend);
  EXPECT_EQ(classifier.classify("Sorry, we cannot serve that hospital.", hospital()->doc), "hospital_not_found");
  EXPECT_FALSE(classifier.classify("Hmm.", hospital()->doc).has_value());
}

TEST(Backend, ScriptedExhaustionModes) {
  auto err = ScriptedBackend::from_strings({"a"});
  EXPECT_EQ(err->complete_prompt("p"), "a");
  EXPECT_THROW(err->complete_prompt("p"), BackendError);
  auto repeat = ScriptedBackend::from_strings({"a", "b"}, ScriptedBackend::OnExhausted::RepeatLast);
  repeat->complete_prompt("1");
  repeat->complete_prompt("2");
  EXPECT_EQ(repeat->complete_prompt("3"), "b");
  EXPECT_EQ(repeat->prompts(), (std::vector<std::string>{"1", "2", "3"}));
  auto cycle = ScriptedBackend::from_json(nlohmann::json::parse(R"({"responses": ["a", {"error": "boom"}], "on_exhausted": "cycle"})"));
  EXPECT_EQ(cycle->complete_prompt("p"), "a");
  EXPECT_THROW(cycle->complete_prompt("p"), BackendError);
  EXPECT_EQ(cycle->complete_prompt("p"), "a");
}

TEST(Backend, OpenAiRequestAndResponseShape) {
  auto body = OpenAiBackend::request_body("m", {{"user", "hi"}}, CompletionParams{0.0, 12});
  EXPECT_EQ(body.at("model"), "m");
  EXPECT_EQ(body.at("messages").at(0).at("content"), "hi");
  EXPECT_EQ(body.at("max_tokens"), 12);
  EXPECT_EQ(OpenAiBackend::parse_response(R"({"choices":[{"message":{"content":"ok"}}]})"), "ok");
  EXPECT_THROW(OpenAiBackend::parse_response("{}"), BackendError);
  EXPECT_THROW(OpenAiBackend::parse_response("not json"), BackendError);
}

TEST(Events, LogAssignsSequenceAndMirrorsJsonl) {
  auto dir = flowagent::testing::scratch_dir("events");
  auto path = dir / "log.jsonl";
  {
    EventLog log(path);
    auto e0 = log.emit("s", 0, "user_message", to_json(Action{UserMessage{"hi", std::nullopt}}));
    auto e1 = log.emit("s", 1, "parse_error", Json{{"reason", "x"}});
    EXPECT_EQ(e0.seq, 0);
    EXPECT_EQ(e1.seq, 1);
    EXPECT_TRUE(is_history_event(e0));
    EXPECT_FALSE(is_history_event(e1));
    EXPECT_EQ(log.since(1).size(), 1u);
    EXPECT_EQ(read_event_log(path), log.events());
  }
}

TEST(Events, WaitSinceWakesOnEmit) {
  EventLog log;
  std::thread producer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    log.emit("s", 0, "session_end", Json{{"reason", "x"}});
  });
  auto got = log.wait_since(0, std::chrono::seconds(5));
  producer.join();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_TRUE(log.wait_since(1, std::chrono::milliseconds(10)).empty());
}

TEST(Session, ApplyCountsExecutions) {
  auto state = make_session("s", hospital());
  state.apply(UserMessage{"hi", std::nullopt});
  state.apply(call("check_hospital"));
  state.apply(ok_result("check_hospital"));
  ToolResult failed = ok_result("check_department");
  failed.ok = false;
  state.apply(failed);
  state.apply(BotResponse{"ok", "request_information", std::nullopt, false});
  state.apply(BotResponse{"forced", "hospital_not_found", std::nullopt, true});
  state.apply(ControllerFeedback{"c", "x"});
  EXPECT_EQ(state.user_turns, 1);
  EXPECT_EQ(state.executed_set(), (std::set<std::string>{"check_hospital", "request_information"}));
  EXPECT_EQ(state.executed_count("check_department"), 0);
  EXPECT_EQ(state.history.size(), 6u);

  auto replayed = replay("s", hospital(), state.history);
  EXPECT_EQ(replayed.executed, state.executed);
  EXPECT_EQ(replayed.user_turns, state.user_turns);
}

TEST(Session, FindViolations) {
  std::vector<Action> history = {ok_result("check_department"), ok_result("check_hospital"),
                                 ok_result("check_department"), ok_result("register_hospital")};
  auto v = find_violations(history, hospital()->graph);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].index, 0u);
  EXPECT_EQ(v[0].unmet, std::set<std::string>{"check_hospital"});
  EXPECT_EQ(v[1].node, "register_hospital");
  EXPECT_EQ(v[1].unmet, std::set<std::string>{"query_appointment"});
}

TEST(Workflow, LoadRejectsInvalidDocuments) {
  EXPECT_THROW(load_workflow_file(fixture("hospital_appointment_verbatim.pdl")), flowagent::pdl::InvalidDocument);
  auto wf = hospital();
  EXPECT_EQ(wf->content_hash, sha256_hex(read_fixture("hospital_appointment.pdl")));
  EXPECT_EQ(wf->id().size(), 12u);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
