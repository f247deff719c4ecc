#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"

namespace flowagent::eval {

enum class Role { User, Bot, System };

const char* to_string(Role role);  // "USER", "BOT", "SYSTEM"

struct ReferenceToolCall {
  std::string name;
  agent::Json args = agent::Json::object();
  bool operator==(const ReferenceToolCall&) const = default;
};

struct ReferenceTurn {
  Role role = Role::User;
  std::string text;  // the transcript text after "ROLE: "
  std::optional<ReferenceToolCall> tool_call;    // BOT tool-call turns
  std::optional<agent::OowAnnotation> oow;       // USER turns only

  bool operator==(const ReferenceTurn&) const = default;
};

struct ReferenceSession {
  std::string session_id;
  std::vector<ReferenceTurn> turns;

  bool operator==(const ReferenceSession&) const = default;
};

// Plain transcript text ("USER: ...", "BOT: <Call API> f({...})", "SYSTEM: {...}",
// "(OOW type) kind/subtype" lines). Lines consisting of "..." are skipped.
// Throws std::invalid_argument with the offending line number.
ReferenceSession parse_transcript_text(std::string_view text, std::string session_id);
std::string render_transcript_text(const ReferenceSession& session);

// JSONL: one turn per line {session_id, index, role, text, tool_call?, oow?}.
std::string to_jsonl(const ReferenceSession& session);
std::vector<ReferenceSession> parse_jsonl(std::string_view text);
std::vector<ReferenceSession> load_reference_file(const std::filesystem::path& path);

// Reference turns as runtime actions (SYSTEM turns become ToolResults of the
// preceding tool call) and back.
std::vector<agent::Action> to_actions(const ReferenceSession& session);
ReferenceSession from_actions(std::string session_id, std::span<const agent::Action> actions);

// Policy outputs that reproduce every BOT turn of `session`, in order; feeding
// them to a scripted backend gives the echo policy used for replay checks.
std::vector<std::string> echo_policy_outputs(const ReferenceSession& session);

}  // namespace flowagent::eval
