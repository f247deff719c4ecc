#include "flowagent/agent/output_parser.hpp"

#include <array>
#include <cctype>
#include <map>

namespace flowagent::agent {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// "Action Input" must be tested before "Action".
constexpr std::array<std::string_view, 5> kLabels = {"Thought", "Response", "Answer", "Action Input",
                                                     "Action"};

}  // namespace

PolicyOutput parse_llm_output(std::string_view text) {
  std::map<std::string, std::string> sections;
  std::string* current = nullptr;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view stripped = trim(line);
    if (stripped.starts_with("```")) continue;

    bool matched = false;
    for (auto label : kLabels) {
      if (stripped.size() > label.size() && stripped.starts_with(label) &&
          stripped[label.size()] == ':') {
        std::string key(label);
        if (sections.contains(key)) return ParseError{"duplicate '" + key + ":' section"};
        current = &sections[key];
        *current = std::string(stripped.substr(label.size() + 1));
        matched = true;
        break;
      }
    }
    if (!matched && current) {
      *current += '\n';
      *current += line;
    }
    if (end == text.size()) break;
  }

  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = sections.find(key);
    if (it == sections.end()) return std::nullopt;
    return std::string(trim(it->second));
  };
  std::optional<std::string> thought = get("Thought");
  if (thought && thought->empty()) thought.reset();
  const auto response = get("Response");
  const auto action = get("Action");
  const auto input = get("Action Input");

  if (response && (action || input)) {
    return ParseError{"output mixes the Response and Action templates"};
  }
  if (response) {
    if (response->empty()) return ParseError{"empty Response"};
    BotResponse out{*response, std::nullopt, thought, false};
    if (auto label = get("Answer"); label && !label->empty() && *label != "none") {
      if (!is_identifier(*label)) return ParseError{"Answer label is not a node name: " + *label};
      out.answer_node = *label;
    }
    return out;
  }
  if (!action) {
    if (input) return ParseError{"Action Input without Action"};
    return ParseError{"no Response or Action found in output"};
  }
  std::string name = *action;
  for (std::string_view prefix : {std::string_view("API_"), std::string_view("functions.")}) {
    if (name.starts_with(prefix)) name = name.substr(prefix.size());
  }
  if (!is_identifier(name)) return ParseError{"invalid action name '" + *action + "'"};
  if (!input) return ParseError{"Action without Action Input"};
  Json args;
  try {
    args = Json::parse(*input);
  } catch (const Json::parse_error& e) {
    return ParseError{std::string("Action Input is not valid JSON: ") + e.what()};
  }
  if (!args.is_object()) return ParseError{"Action Input must be a JSON object"};
  for (const auto& [k, v] : args.items()) {
    if (v.is_structured()) return ParseError{"Action Input value for '" + k + "' is not a scalar"};
  }
  return ToolCall{std::move(name), std::move(args), thought};
}

std::string render_llm_output(const BotResponse& response) {
  std::string out;
  if (response.thought) out += "Thought: " + *response.thought + "\n";
  out += "Response: " + response.text;
  if (response.answer_node) out += "\nAnswer: " + *response.answer_node;
  return out;
}

std::string render_llm_output(const ToolCall& call) {
  std::string out;
  if (call.thought) out += "Thought: " + *call.thought + "\n";
  out += "Action: " + call.name + "\nAction Input: " + call.args.dump();
  return out;
}

}  // namespace flowagent::agent
