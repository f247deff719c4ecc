#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"
#include "flowagent/pdl/document.hpp"

namespace flowagent::agent {

struct ToolSchema {
  std::string name;
  std::string description;
  std::vector<std::string> request;
  std::vector<std::string> response;
  std::set<std::string> optional;  // request slots that may be omitted
};

struct ToolSpec {
  struct TableEntry {
    Json args;
    Json payload;
  };
  struct Failure {
    int on_call = 1;  // 1-based index of the execution that fails
    std::string error;
  };

  ToolSchema schema;
  std::vector<TableEntry> table;      // keyed by canonical args
  std::vector<Json> responses;        // sequential, by call index
  std::optional<Json> default_payload;
  std::vector<Failure> failures;
};

// Immutable after construction; safe to share across sessions.
class ToolRegistry {
 public:
  ToolRegistry() = default;

  // {tool: {schema: {description, request, response, optional}, table: [{args, payload}],
  //  responses: [payload...], default: payload, failures: [{on_call, error}]}}.
  // Schema fields missing from the fixture are filled from the matching API
  // node of `doc` when given.
  static ToolRegistry from_json(const nlohmann::json& json, const pdl::PdlDocument* doc = nullptr);
  static ToolRegistry from_file(const std::filesystem::path& path,
                                const pdl::PdlDocument* doc = nullptr);
  // One entry per API node, answering every call with an empty payload.
  static ToolRegistry from_document(const pdl::PdlDocument& doc);

  void add(ToolSpec spec);
  bool contains(const std::string& name) const { return tools_.contains(name); }
  const ToolSpec* find(const std::string& name) const;
  std::vector<std::string> names() const;

  // API nodes of `doc` without a registry entry.
  std::vector<std::string> missing_for(const pdl::PdlDocument& doc) const;

 private:
  std::map<std::string, ToolSpec> tools_;
};

// Pure: `prior_calls` is how many times this tool already executed in the
// session. Errors (unknown tool, missing slot, injected failure) come back as
// a ToolResult with ok == false and {"error": kind, "message": ...}.
ToolResult execute_tool(const ToolRegistry& registry, const ToolCall& call, int prior_calls);

// Successful or failed executions of `name` recorded in `history`.
int prior_tool_calls(std::span<const Action> history, const std::string& name);

}  // namespace flowagent::agent
