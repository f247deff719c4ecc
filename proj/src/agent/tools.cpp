#include "flowagent/agent/tools.hpp"

#include <fstream>

namespace flowagent::agent {

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

Json error_payload(const char* kind, const std::string& message) {
  Json out = Json::object();
  out["error"] = kind;
  out["message"] = message;
  return out;
}

}  // namespace

ToolRegistry ToolRegistry::from_json(const nlohmann::json& json, const pdl::PdlDocument* doc) {
  if (!json.is_object()) throw std::invalid_argument("tool fixture must be a JSON object");
  ToolRegistry registry;
  for (const auto& [name, entry] : json.items()) {
    ToolSpec spec;
    spec.schema.name = name;
    const pdl::NodeDef* node = doc ? doc->find_api(name) : nullptr;
    const auto schema = entry.value("schema", nlohmann::json::object());
    spec.schema.description =
        schema.value("description", node && node->desc ? *node->desc : std::string());
    spec.schema.request = schema.contains("request") ? string_list(schema, "request")
                          : node                     ? node->request_slots
                                                     : std::vector<std::string>{};
    spec.schema.response = schema.contains("response") ? string_list(schema, "response")
                           : node                      ? node->response_slots
                                                       : std::vector<std::string>{};
    for (const auto& s : string_list(schema, "optional")) spec.schema.optional.insert(s);
    for (const auto& row : entry.value("table", nlohmann::json::array())) {
      spec.table.push_back({Json(row.at("args")), Json(row.at("payload"))});
    }
    for (const auto& r : entry.value("responses", nlohmann::json::array())) spec.responses.emplace_back(r);
    if (entry.contains("default")) spec.default_payload = Json(entry.at("default"));
    for (const auto& f : entry.value("failures", nlohmann::json::array())) {
      spec.failures.push_back({f.value("on_call", 1), f.value("error", std::string("injected failure"))});
    }
    registry.add(std::move(spec));
  }
  return registry;
}

ToolRegistry ToolRegistry::from_file(const std::filesystem::path& path, const pdl::PdlDocument* doc) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return from_json(nlohmann::json::parse(in), doc);
}

ToolRegistry ToolRegistry::from_document(const pdl::PdlDocument& doc) {
  ToolRegistry registry;
  for (const auto& node : doc.api_nodes) {
    ToolSpec spec;
    spec.schema = {node.name, node.desc.value_or(""), node.request_slots, node.response_slots, {}};
    spec.default_payload = Json::object();
    registry.add(std::move(spec));
  }
  return registry;
}

void ToolRegistry::add(ToolSpec spec) {
  auto name = spec.schema.name;
  tools_.insert_or_assign(std::move(name), std::move(spec));
}

const ToolSpec* ToolRegistry::find(const std::string& name) const {
  auto it = tools_.find(name);
  return it == tools_.end() ? nullptr : &it->second;
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : tools_) out.push_back(name);
  return out;
}

std::vector<std::string> ToolRegistry::missing_for(const pdl::PdlDocument& doc) const {
  std::vector<std::string> out;
  for (const auto& node : doc.api_nodes) {
    if (!contains(node.name)) out.push_back(node.name);
  }
  return out;
}

ToolResult execute_tool(const ToolRegistry& registry, const ToolCall& call, int prior_calls) {
  const ToolSpec* spec = registry.find(call.name);
  if (!spec) {
    return {call.name, error_payload("UnknownTool", "no tool named '" + call.name + "'"), false};
  }
  for (const auto& slot : spec->schema.request) {
    if (spec->schema.optional.contains(slot)) continue;
    if (!call.args.contains(slot) || call.args.at(slot).is_null()) {
      return {call.name, error_payload("MissingSlot", "missing required parameter '" + slot + "'"),
              false};
    }
  }
  const int call_number = prior_calls + 1;
  for (const auto& f : spec->failures) {
    if (f.on_call == call_number) return {call.name, error_payload("Injected", f.error), false};
  }
  const std::string key = canonical_args(call.args);
  for (const auto& row : spec->table) {
    if (canonical_args(row.args) == key) return {call.name, row.payload, true};
  }
  if (static_cast<std::size_t>(prior_calls) < spec->responses.size()) {
    return {call.name, spec->responses[static_cast<std::size_t>(prior_calls)], true};
  }
  return {call.name, spec->default_payload.value_or(Json::object()), true};
}

int prior_tool_calls(std::span<const Action> history, const std::string& name) {
  int count = 0;
  for (const auto& a : history) {
    if (const auto* r = std::get_if<ToolResult>(&a); r && r->name == name) ++count;
  }
  return count;
}

}  // namespace flowagent::agent
