#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowagent/pdl/document.hpp"

namespace flowagent::pdl {

class CycleError : public std::runtime_error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class UnknownNode : public std::runtime_error {
 public:
  explicit UnknownNode(const std::string& name)
      : std::runtime_error("unknown node: " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Node -> precondition edges. Immutable once built.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  // Throws UnknownNode for edge targets outside `nodes` and CycleError when
  // the edges are cyclic.
  DependencyGraph(std::set<std::string> nodes, std::map<std::string, std::set<std::string>> edges);

  const std::set<std::string>& nodes() const noexcept { return nodes_; }
  const std::map<std::string, std::set<std::string>>& edges() const noexcept { return edges_; }
  bool contains(const std::string& node) const { return nodes_.contains(node); }
  // Throws UnknownNode.
  const std::set<std::string>& preconditions(const std::string& node) const;
  // Nodes that list `node` as a precondition.
  std::set<std::string> dependents(const std::string& node) const;

  bool operator==(const DependencyGraph&) const = default;

 private:
  std::set<std::string> nodes_;
  std::map<std::string, std::set<std::string>> edges_;  // every node has an entry
};

struct Accessibility {
  std::set<std::string> accessible;
  std::map<std::string, std::set<std::string>> blocked;  // node -> unmet preconditions
};

// One node per declared NodeDef; edges are exactly the precondition lists.
DependencyGraph build_dependency_graph(const PdlDocument& doc);

// A node is accessible iff all of its preconditions have executed.
Accessibility accessible_nodes(const DependencyGraph& graph, const std::set<std::string>& executed);

// Kahn's algorithm with lexicographic tie-breaking.
std::vector<std::string> topological_order(const DependencyGraph& graph);

// First cycle found in `edges` (node -> preconditions), as a closed path
// [a, b, ..., a]; empty when acyclic. Edges to unknown nodes are ignored.
std::vector<std::string> find_cycle(const std::map<std::string, std::set<std::string>>& edges);

}  // namespace flowagent::pdl
