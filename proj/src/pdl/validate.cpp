#include "flowagent/pdl/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "flowagent/pdl/graph.hpp"
#include "flowagent/pdl/parser.hpp"

namespace flowagent::pdl {

namespace {

void check_duplicates(const PdlDocument& doc, std::vector<Diagnostic>& out) {
  std::map<std::string, const NodeDef*> seen;
  for (const auto* node : doc.all_nodes()) {
    auto [it, inserted] = seen.emplace(node->name, node);
    if (inserted) continue;
    out.push_back({Severity::Error, codes::kDuplicateNode,
                   "node '" + node->name + "' is already declared at line " +
                       std::to_string(it->second->location.line),
                   node->location});
  }
}

void check_preconditions(const PdlDocument& doc, std::vector<Diagnostic>& out) {
  for (const auto* node : doc.all_nodes()) {
    for (const auto& pre : node->preconditions) {
      if (doc.find_node(pre)) continue;
      out.push_back({Severity::Error, codes::kUnknownPrecondition,
                     "node '" + node->name + "' lists unknown precondition '" + pre + "'",
                     node->location});
    }
  }
}

void check_call_sites(const PdlDocument& doc, std::vector<Diagnostic>& out) {
  std::vector<const NodeCall*> calls;
  collect_calls(doc.procedure_ast.statements, calls);
  for (const auto* call : calls) {
    switch (call->ns) {
      case NodeNamespace::Api:
        if (doc.find_api(call->name)) continue;
        out.push_back({Severity::Error, codes::kUnknownNodeReference,
                       doc.find_answer(call->name)
                           ? "'" + call->name + "' is an ANSWER node; call it as ANSWER." + call->name
                           : "call to undeclared API node '" + call->name + "'",
                       call->location});
        break;
      case NodeNamespace::Answer:
        if (doc.find_answer(call->name)) continue;
        out.push_back({Severity::Error, codes::kUnknownNodeReference,
                       doc.find_api(call->name)
                           ? "'" + call->name + "' is an API node; call it as API." + call->name
                           : "call to undeclared ANSWER node '" + call->name + "'",
                       call->location});
        break;
      case NodeNamespace::Unqualified:
        if (doc.find_node(call->name)) continue;
        out.push_back({Severity::Error, codes::kUnknownNodeReference,
                       "call to undeclared node '" + call->name + "'", call->location});
        break;
    }
  }
}

void check_cycles(const PdlDocument& doc, std::vector<Diagnostic>& out) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto* node : doc.all_nodes()) {
    edges[node->name].insert(node->preconditions.begin(), node->preconditions.end());
  }
  auto cycle = find_cycle(edges);
  if (cycle.empty()) return;
  const NodeDef* first = doc.find_node(cycle.front());
  out.push_back({Severity::Error, codes::kCycle, CycleError(cycle).what(),
                 first ? first->location : SourceLocation{}});
}

void check_usage(const PdlDocument& doc, std::vector<Diagnostic>& out) {
  std::vector<const NodeCall*> calls;
  collect_calls(doc.procedure_ast.statements, calls);
  std::set<std::string> called;
  for (const auto* call : calls) called.insert(call->name);
  std::set<std::string> referenced_as_pre;
  for (const auto* node : doc.all_nodes()) {
    referenced_as_pre.insert(node->preconditions.begin(), node->preconditions.end());
  }
  for (const auto* node : doc.all_nodes()) {
    if (called.contains(node->name) || referenced_as_pre.contains(node->name)) continue;
    out.push_back({Severity::Warning, codes::kUnusedNode,
                   std::string(to_string(node->kind)) + " node '" + node->name +
                       "' is never referenced by the procedure",
                   node->location});
  }

  std::vector<std::string> idents;
  collect_identifiers(doc.procedure_ast.statements, idents);
  std::set<std::string> used(idents.begin(), idents.end());
  for (const auto* node : doc.all_nodes()) {
    used.insert(node->request_slots.begin(), node->request_slots.end());
    if (node->desc) {
      for (const auto& p : template_placeholders(*node->desc)) used.insert(p.slot);
    }
  }
  for (const auto& node : doc.api_nodes) {
    for (const auto& slot : node.response_slots) {
      if (used.contains(slot)) continue;
      out.push_back({Severity::Warning, codes::kUnusedSlot,
                     "response slot '" + slot + "' of '" + node.name + "' is never used",
                     node.location});
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const PdlDocument& doc) {
  std::vector<Diagnostic> out;
  check_duplicates(doc, out);
  check_preconditions(doc, out);
  check_call_sites(doc, out);
  check_cycles(doc, out);
  check_usage(doc, out);
  std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.location.line != b.location.line) return a.location.line < b.location.line;
    return a.location.column < b.location.column;
  });
  return out;
}

std::vector<Diagnostic> check_source(std::string_view source) {
  auto parsed = parse_pdl(source);
  auto out = std::move(parsed.diagnostics);
  if (parsed.value) {
    auto checks = validate(*parsed.value);
    out.insert(out.end(), checks.begin(), checks.end());
  }
  return out;
}

}  // namespace flowagent::pdl
