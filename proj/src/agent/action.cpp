#include "flowagent/agent/action.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "flowagent/agent/pyrepr.hpp"

namespace flowagent::agent {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string normalize_kind(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '-' || c == ' ') {
      out += '_';
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      if (i > 0 && !out.empty() && out.back() != '_') out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

const char* to_string(OowKind kind) {
  switch (kind) {
    case OowKind::IntentSwitching: return "intent_switching";
    case OowKind::ProcedureJumping: return "procedure_jumping";
    case OowKind::IrrelevantAnswering: return "irrelevant_answering";
  }
  return "?";
}

std::optional<OowKind> parse_oow_kind(std::string_view text) {
  const std::string key = normalize_kind(text);
  for (auto kind : kAllOowKinds) {
    if (key == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::string format_oow(const OowAnnotation& oow) {
  std::string out = to_string(oow.kind);
  if (!oow.subtype.empty()) out += "/" + oow.subtype;
  return out;
}

std::optional<OowAnnotation> parse_oow(std::string_view text) {
  auto slash = text.find('/');
  auto kind = parse_oow_kind(text.substr(0, slash));
  if (!kind) return std::nullopt;
  OowAnnotation out{*kind, {}};
  if (slash != std::string_view::npos) out.subtype = std::string(text.substr(slash + 1));
  return out;
}

const char* action_type(const Action& action) {
  return std::visit(Overloaded{
                        [](const UserMessage&) { return "user_message"; },
                        [](const BotResponse&) { return "bot_response"; },
                        [](const ToolCall&) { return "tool_call"; },
                        [](const ToolResult&) { return "tool_result"; },
                        [](const ControllerFeedback&) { return "controller_feedback"; },
                        [](const SessionEnd&) { return "session_end"; },
                    },
                    action);
}

Json to_json(const Action& action) {
  Json out;
  out["type"] = action_type(action);
  std::visit(Overloaded{
                 [&](const UserMessage& a) {
                   out["text"] = a.text;
                   if (a.oow) out["oow"] = format_oow(*a.oow);
                 },
                 [&](const BotResponse& a) {
                   out["text"] = a.text;
                   if (a.answer_node) out["answer_node"] = *a.answer_node;
                   if (a.thought) out["thought"] = *a.thought;
                   if (a.forced) out["forced"] = true;
                 },
                 [&](const ToolCall& a) {
                   out["name"] = a.name;
                   out["args"] = a.args;
                   if (a.thought) out["thought"] = *a.thought;
                 },
                 [&](const ToolResult& a) {
                   out["name"] = a.name;
                   out["payload"] = a.payload;
                   out["ok"] = a.ok;
                 },
                 [&](const ControllerFeedback& a) {
                   out["controller_id"] = a.controller_id;
                   out["text"] = a.text;
                 },
                 [&](const SessionEnd& a) { out["reason"] = a.reason; },
             },
             action);
  return out;
}

Action action_from_json(const Json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "user_message") {
      UserMessage m{j.at("text").get<std::string>(), std::nullopt};
      if (auto oow = optional_field<std::string>(j, "oow")) {
        m.oow = parse_oow(*oow);
        if (!m.oow) throw std::invalid_argument("unknown OOW kind: " + *oow);
      }
      return m;
    }
    if (type == "bot_response") {
      return BotResponse{j.at("text").get<std::string>(), optional_field<std::string>(j, "answer_node"),
                         optional_field<std::string>(j, "thought"), j.value("forced", false)};
    }
    if (type == "tool_call") {
      return ToolCall{j.at("name").get<std::string>(), j.value("args", Json::object()),
                      optional_field<std::string>(j, "thought")};
    }
    if (type == "tool_result") {
      return ToolResult{j.at("name").get<std::string>(), j.value("payload", Json::object()),
                        j.value("ok", true)};
    }
    if (type == "controller_feedback") {
      return ControllerFeedback{j.at("controller_id").get<std::string>(),
                                j.at("text").get<std::string>()};
    }
    if (type == "session_end") return SessionEnd{j.value("reason", std::string())};
    throw std::invalid_argument("unknown action type: " + type);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed action: ") + e.what());
  }
}

std::string canonical_args(const Json& args) {
  // nlohmann::json stores objects in a std::map, so conversion sorts keys.
  return nlohmann::json(args).dump();
}

std::optional<std::string> transcript_line(const Action& action) {
  return std::visit(
      Overloaded{
          [](const UserMessage& a) -> std::optional<std::string> { return "USER: " + a.text; },
          [](const BotResponse& a) -> std::optional<std::string> { return "BOT: " + a.text; },
          [](const ToolCall& a) -> std::optional<std::string> {
            return "BOT: <Call API> " + a.name + "(" + to_pyrepr(a.args) + ")";
          },
          [](const ToolResult& a) -> std::optional<std::string> {
            return "SYSTEM: " + to_pyrepr(a.payload);
          },
          [](const ControllerFeedback&) -> std::optional<std::string> { return std::nullopt; },
          [](const SessionEnd&) -> std::optional<std::string> { return std::nullopt; },
      },
      action);
}

std::string render_transcript(std::span<const Action> actions) {
  std::string out;
  for (const auto& a : actions) {
    auto line = transcript_line(a);
    if (!line) continue;
    if (!out.empty()) out += '\n';
    out += *line;
  }
  return out;
}

}  // namespace flowagent::agent
