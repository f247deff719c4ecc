#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace flowagent::agent {

using Json = nlohmann::ordered_json;

enum class OowKind { IntentSwitching, ProcedureJumping, IrrelevantAnswering };

// "intent_switching", "procedure_jumping", "irrelevant_answering"
const char* to_string(OowKind kind);
// Accepts the snake_case names above, hyphenated and CamelCase spellings.
std::optional<OowKind> parse_oow_kind(std::string_view text);
inline constexpr OowKind kAllOowKinds[] = {OowKind::IntentSwitching, OowKind::ProcedureJumping,
                                           OowKind::IrrelevantAnswering};

struct OowAnnotation {
  OowKind kind = OowKind::IntentSwitching;
  std::string subtype;  // free text, e.g. "detail-switching"
  bool operator==(const OowAnnotation&) const = default;
};

// "intent_switching/detail-switching"
std::string format_oow(const OowAnnotation& oow);
std::optional<OowAnnotation> parse_oow(std::string_view text);

struct UserMessage {
  std::string text;
  std::optional<OowAnnotation> oow;
  bool operator==(const UserMessage&) const = default;
};

struct BotResponse {
  std::string text;
  std::optional<std::string> answer_node;
  std::optional<std::string> thought;
  bool forced = false;  // produced by the runtime (fallback or closing), not the policy
  bool operator==(const BotResponse&) const = default;
};

struct ToolCall {
  std::string name;
  Json args = Json::object();  // flat object, insertion order preserved
  std::optional<std::string> thought;
  bool operator==(const ToolCall&) const = default;
};

struct ToolResult {
  std::string name;
  Json payload = Json::object();
  bool ok = true;
  bool operator==(const ToolResult&) const = default;
};

struct ControllerFeedback {
  std::string controller_id;
  std::string text;
  bool operator==(const ControllerFeedback&) const = default;
};

struct SessionEnd {
  std::string reason;
  bool operator==(const SessionEnd&) const = default;
};

using Action =
    std::variant<UserMessage, BotResponse, ToolCall, ToolResult, ControllerFeedback, SessionEnd>;

// "user_message", "bot_response", "tool_call", "tool_result",
// "controller_feedback", "session_end"
const char* action_type(const Action& action);

// {"type": ..., <fields>}
Json to_json(const Action& action);
// Throws std::invalid_argument on unknown type or malformed fields.
Action action_from_json(const Json& json);

// Key-sorted compact serialization used to compare argument objects.
std::string canonical_args(const Json& args);

// One transcript line in the reference format:
//   USER: text / BOT: text / BOT: <Call API> name({...}) / SYSTEM: {...}
// Controller feedback and session ends are not part of the transcript and
// render as std::nullopt.
std::optional<std::string> transcript_line(const Action& action);
std::string render_transcript(std::span<const Action> actions);

}  // namespace flowagent::agent
