#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowagent/pdl/ast.hpp"
#include "flowagent/pdl/diagnostic.hpp"

namespace flowagent::pdl {

enum class NodeKind { Api, Answer };

const char* to_string(NodeKind kind);

struct NodeDef {
  NodeKind kind = NodeKind::Api;
  std::string name;
  std::optional<std::string> desc;
  std::vector<std::string> request_slots;
  std::vector<std::string> response_slots;
  std::vector<std::string> preconditions;
  SourceLocation location;  // not part of structural equality

  bool operator==(const NodeDef& other) const {
    return kind == other.kind && name == other.name && desc == other.desc &&
           request_slots == other.request_slots && response_slots == other.response_slots &&
           preconditions == other.preconditions;
  }
};

struct PdlDocument {
  std::string name;
  std::string desc;
  std::optional<std::string> detailed_desc;
  std::vector<NodeDef> api_nodes;
  std::vector<NodeDef> answer_nodes;
  std::string procedure_source;  // block scalar content, indentation stripped
  ProcedureAst procedure_ast;
  int procedure_first_line = 0;  // document line of the first procedure line

  // Structural equality ignores the raw procedure text and locations.
  bool operator==(const PdlDocument& other) const {
    return name == other.name && desc == other.desc && detailed_desc == other.detailed_desc &&
           api_nodes == other.api_nodes && answer_nodes == other.answer_nodes &&
           procedure_ast == other.procedure_ast;
  }

  const NodeDef* find_node(std::string_view node_name) const;
  const NodeDef* find_api(std::string_view node_name) const;
  const NodeDef* find_answer(std::string_view node_name) const;
  // API nodes first, then ANSWER nodes, each in declaration order.
  std::vector<const NodeDef*> all_nodes() const;
};

// `$slot` or `$node-slot` reference inside an ANSWER template.
struct TemplatePlaceholder {
  std::optional<std::string> node;
  std::string slot;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const TemplatePlaceholder&) const = default;
};

std::vector<TemplatePlaceholder> template_placeholders(std::string_view text);

}  // namespace flowagent::pdl
