#include "flowagent/eval/reference.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "flowagent/agent/output_parser.hpp"
#include "flowagent/agent/pyrepr.hpp"

namespace flowagent::eval {

using agent::Json;

namespace {

constexpr std::string_view kCallMarker = "<Call API> ";
constexpr std::string_view kOowMarker = "(OOW type)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "name({...})" -> tool call; the argument is a Python dict literal.
ReferenceToolCall parse_call(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw std::invalid_argument("malformed API call '" + std::string(text) + "'");
  }
  ReferenceToolCall call;
  call.name = std::string(trim(text.substr(0, open)));
  auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  call.args = inner.empty() ? Json::object() : agent::parse_pyliteral(inner);
  if (!call.args.is_object()) throw std::invalid_argument("API call argument must be a dict");
  return call;
}

Role parse_role(const std::string& s) {
  if (s == "USER") return Role::User;
  if (s == "BOT") return Role::Bot;
  if (s == "SYSTEM") return Role::System;
  throw std::invalid_argument("unknown role '" + s + "'");
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::User: return "USER";
    case Role::Bot: return "BOT";
    case Role::System: return "SYSTEM";
  }
  return "?";
}

ReferenceSession parse_transcript_text(std::string_view text, std::string session_id) {
  ReferenceSession session{std::move(session_id), {}};
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line == "...") continue;
    try {
      if (line.starts_with(kOowMarker)) {
        if (session.turns.empty() || session.turns.back().role != Role::User) {
          throw std::invalid_argument("OOW annotation must follow a USER turn");
        }
        auto oow = agent::parse_oow(trim(line.substr(kOowMarker.size())));
        if (!oow) throw std::invalid_argument("unknown OOW type");
        session.turns.back().oow = oow;
        continue;
      }
      auto colon = line.find(": ");
      if (colon == std::string_view::npos) throw std::invalid_argument("expected 'ROLE: text'");
      ReferenceTurn turn;
      turn.role = parse_role(std::string(line.substr(0, colon)));
      turn.text = std::string(line.substr(colon + 2));
      if (turn.role == Role::Bot && std::string_view(turn.text).starts_with(kCallMarker)) {
        turn.tool_call = parse_call(std::string_view(turn.text).substr(kCallMarker.size()));
      }
      session.turns.push_back(std::move(turn));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return session;
}

std::string render_transcript_text(const ReferenceSession& session) {
  std::string out;
  for (const auto& t : session.turns) {
    out += std::string(to_string(t.role)) + ": " + t.text + "\n";
    if (t.oow) out += "    " + std::string(kOowMarker) + " " + agent::format_oow(*t.oow) + "\n";
  }
  return out;
}

std::string to_jsonl(const ReferenceSession& session) {
  std::string out;
  for (std::size_t i = 0; i < session.turns.size(); ++i) {
    const auto& t = session.turns[i];
    Json line;
    line["session_id"] = session.session_id;
    line["index"] = i;
    line["role"] = to_string(t.role);
    line["text"] = t.text;
    if (t.tool_call) line["tool_call"] = {{"name", t.tool_call->name}, {"args", t.tool_call->args}};
    if (t.oow) line["oow"] = agent::format_oow(*t.oow);
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<ReferenceSession> parse_jsonl(std::string_view text) {
  std::vector<ReferenceSession> out;
  std::map<std::string, std::size_t> index;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = Json::parse(line);
      const auto id = j.at("session_id").get<std::string>();
      auto [it, inserted] = index.emplace(id, out.size());
      if (inserted) out.push_back({id, {}});
      ReferenceTurn turn;
      turn.role = parse_role(j.at("role").get<std::string>());
      turn.text = j.at("text").get<std::string>();
      if (j.contains("tool_call")) {
        turn.tool_call = ReferenceToolCall{j.at("tool_call").at("name").get<std::string>(),
                                           j.at("tool_call").value("args", Json::object())};
      }
      if (j.contains("oow")) {
        turn.oow = agent::parse_oow(j.at("oow").get<std::string>());
        if (!turn.oow) throw std::invalid_argument("unknown OOW type");
        if (turn.role != Role::User) throw std::invalid_argument("OOW annotation on a non-USER turn");
      }
      if (turn.role == Role::Bot && !turn.tool_call && std::string_view(turn.text).starts_with(kCallMarker)) {
        turn.tool_call = parse_call(std::string_view(turn.text).substr(kCallMarker.size()));
      }
      out[it->second].turns.push_back(std::move(turn));
    } catch (const std::exception& e) {
      throw std::invalid_argument("reference line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ReferenceSession> load_reference_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".jsonl" || path.extension() == ".json") return parse_jsonl(ss.str());
  return {parse_transcript_text(ss.str(), path.stem().string())};
}

std::vector<agent::Action> to_actions(const ReferenceSession& session) {
  std::vector<agent::Action> out;
  std::string last_tool;
  for (const auto& t : session.turns) {
    switch (t.role) {
      case Role::User: out.push_back(agent::UserMessage{t.text, t.oow}); break;
      case Role::Bot:
        if (t.tool_call) {
          last_tool = t.tool_call->name;
          out.push_back(agent::ToolCall{t.tool_call->name, t.tool_call->args, std::nullopt});
        } else {
          out.push_back(agent::BotResponse{t.text, std::nullopt, std::nullopt, false});
        }
        break;
      case Role::System: {
        Json payload;
        try {
          payload = agent::parse_pyliteral(t.text);
        } catch (const std::invalid_argument&) {
          payload = Json::object();
          payload["text"] = t.text;
        }
        const bool ok = !(payload.is_object() && payload.contains("error"));
        out.push_back(agent::ToolResult{last_tool, std::move(payload), ok});
        break;
      }
    }
  }
  return out;
}

ReferenceSession from_actions(std::string session_id, std::span<const agent::Action> actions) {
  ReferenceSession session{std::move(session_id), {}};
  for (const auto& a : actions) {
    auto line = agent::transcript_line(a);
    if (!line) continue;
    ReferenceTurn turn;
    auto colon = line->find(": ");
    turn.role = parse_role(line->substr(0, colon));
    turn.text = line->substr(colon + 2);
    if (const auto* call = std::get_if<agent::ToolCall>(&a)) {
      turn.tool_call = ReferenceToolCall{call->name, call->args};
    } else if (const auto* user = std::get_if<agent::UserMessage>(&a)) {
      turn.oow = user->oow;
    }
    session.turns.push_back(std::move(turn));
  }
  return session;
}

std::vector<std::string> echo_policy_outputs(const ReferenceSession& session) {
  std::vector<std::string> out;
  for (const auto& t : session.turns) {
    if (t.role != Role::Bot) continue;
    if (t.tool_call) {
      out.push_back(agent::render_llm_output(agent::ToolCall{t.tool_call->name, t.tool_call->args, std::nullopt}));
    } else {
      out.push_back(agent::render_llm_output(agent::BotResponse{t.text, std::nullopt, std::nullopt, false}));
    }
  }
  return out;
}

}  // namespace flowagent::eval
