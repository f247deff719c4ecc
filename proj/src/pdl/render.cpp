#include "flowagent/pdl/render.hpp"

#include <cctype>

#include <json.hpp>

namespace flowagent::pdl {

namespace {

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (std::isspace(static_cast<unsigned char>(s.front())) ||
      std::isspace(static_cast<unsigned char>(s.back()))) {
    return true;
  }
  if (s.front() == '"' || s.front() == '\'') return true;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t') return true;
  }
  return false;
}

std::string scalar(const std::string& s) {
  return needs_quotes(s) ? nlohmann::json(s).dump() : s;
}

std::string flow_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out + "]";
}

void render_nodes(std::string& out, const char* header, const std::vector<NodeDef>& nodes) {
  if (nodes.empty()) {
    out += std::string(header) + ": []\n\n";
    return;
  }
  out += std::string(header) + ":\n";
  for (const auto& node : nodes) {
    out += "  - name: " + node.name + "\n";
    if (node.desc) out += "    desc: " + scalar(*node.desc) + "\n";
    const bool api = node.kind == NodeKind::Api;
    if (api || !node.request_slots.empty()) {
      out += "    request: " + flow_list(node.request_slots) + "\n";
    }
    if (api || !node.response_slots.empty()) {
      out += "    response: " + flow_list(node.response_slots) + "\n";
    }
    if (api || !node.preconditions.empty()) {
      out += "    precondition: " + flow_list(node.preconditions) + "\n";
    }
  }
  out += "\n";
}

}  // namespace

std::string render_for_prompt(const PdlDocument& doc) {
  std::string out;
  out += "Name: " + scalar(doc.name) + "\n";
  out += "Desc: " + scalar(doc.desc) + "\n";
  if (doc.detailed_desc) out += "Detailed_desc: " + scalar(*doc.detailed_desc) + "\n";
  out += "\n";
  render_nodes(out, "APIs", doc.api_nodes);
  render_nodes(out, "ANSWERs", doc.answer_nodes);
  out += "Procedure: |\n";
  std::string body = render_procedure(doc.procedure_ast, 2);
  std::size_t start = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    auto line = body.substr(start, end - start);
    if (!line.empty()) out += "  " + line;
    out += "\n";
    start = end + 1;
  }
  return out;
}

}  // namespace flowagent::pdl
