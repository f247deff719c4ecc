#include "flowagent/agent/prompt.hpp"

#include <cctype>
#include <stdexcept>

#include "flowagent/pdl/render.hpp"

namespace flowagent::agent {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    std::string_view expr = tmpl.substr(open + 2, close - open - 2);
    std::string_view name = expr;
    std::vector<std::string_view> filters;
    if (auto bar = expr.find('|'); bar != std::string_view::npos) {
      name = expr.substr(0, bar);
      filters.push_back(trim(expr.substr(bar + 1)));
    }
    name = trim(name);
    auto it = vars.find(std::string(name));
    if (it == vars.end()) {
      throw std::invalid_argument("template variable '" + std::string(name) + "' has no value");
    }
    std::string value = it->second;
    for (auto f : filters) {
      if (f != "trim") throw std::invalid_argument("unknown template filter '" + std::string(f) + "'");
      value = std::string(trim(value));
    }
    out += value;
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

nlohmann::ordered_json tool_function_schema(const ToolSchema& schema) {
  nlohmann::ordered_json properties = nlohmann::ordered_json::object();
  nlohmann::ordered_json required = nlohmann::ordered_json::array();
  for (const auto& slot : schema.request) {
    properties[slot] = {{"type", "string"}};
    if (!schema.optional.contains(slot)) required.push_back(slot);
  }
  nlohmann::ordered_json fn;
  fn["name"] = schema.name;
  fn["description"] = schema.description;
  fn["parameters"] = {{"type", "object"}, {"properties", properties}, {"required", required}};
  return fn;
}

std::string render_api_infos(const ToolRegistry& registry,
                             const std::map<std::string, std::set<std::string>>& blocked) {
  std::string out;
  for (const auto& name : registry.names()) {
    const auto& schema = registry.find(name)->schema;
    if (!out.empty()) out += '\n';
    out += "- " + name + ": " + tool_function_schema(schema).dump();
    if (auto it = blocked.find(name); it != blocked.end()) {
      out += "\n  (blocked: requires " + join(it->second) + ")";
    }
  }
  return out;
}

std::string render_history(std::span<const Action> history, std::span<const std::string> scratch) {
  std::string out = render_transcript(history);
  if (out.empty()) out = std::string(kEmptyHistory);
  for (const auto& note : scratch) out += "\n[Controller feedback] " + note;
  return out;
}

std::string render_current_state(const SessionState& state,
                                 std::span<const control::PreGuidance> guidance) {
  std::string executed;
  if (state.workflow) {
    for (const auto& node : pdl::topological_order(state.workflow->graph)) {
      int n = state.executed_count(node);
      if (n == 0) continue;
      if (!executed.empty()) executed += ", ";
      executed += node + " (x" + std::to_string(n) + ")";
    }
  }
  std::string out = "Executed nodes: " + (executed.empty() ? std::string("(none)") : executed);
  out += "\nUser turns so far: " + std::to_string(state.user_turns);
  for (const auto& g : guidance) out += "\n" + g.guidance_text;
  return out;
}

std::string build_prompt(const pdl::PdlDocument& doc, const SessionState& state,
                         std::span<const control::PreGuidance> guidance, const ToolRegistry& registry,
                         std::span<const std::string> scratch) {
  std::map<std::string, std::set<std::string>> blocked;
  for (const auto& g : guidance) blocked.insert(g.blocked.begin(), g.blocked.end());
  return render_template(prompts::flowagent(),
                         {{"PDL", std::string(trim(pdl::render_for_prompt(doc)))},
                          {"api_infos", render_api_infos(registry, blocked)},
                          {"conversation", render_history(state.history, scratch)},
                          {"current_state", render_current_state(state, guidance)}});
}

std::string FlowAgentPromptBuilder::build(const PromptContext& ctx) const {
  if (!ctx.state.workflow) throw std::invalid_argument("session has no workflow");
  return build_prompt(ctx.state.workflow->doc, ctx.state, ctx.guidance, ctx.registry, ctx.scratch);
}

}  // namespace flowagent::agent
