#include "flowagent/pdl/graph.hpp"

#include <algorithm>
#include <functional>

namespace flowagent::pdl {

namespace {

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& n : path) {
    if (!out.empty()) out += " -> ";
    out += n;
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : std::runtime_error("precondition cycle: " + join_path(cycle)), cycle_(std::move(cycle)) {}

DependencyGraph::DependencyGraph(std::set<std::string> nodes,
                                 std::map<std::string, std::set<std::string>> edges)
    : nodes_(std::move(nodes)) {
  for (const auto& n : nodes_) edges_[n];
  for (auto& [node, pre] : edges) {
    if (!nodes_.contains(node)) throw UnknownNode(node);
    for (const auto& p : pre) {
      if (!nodes_.contains(p)) throw UnknownNode(p);
    }
    edges_[node] = std::move(pre);
  }
  auto cycle = find_cycle(edges_);
  if (!cycle.empty()) throw CycleError(std::move(cycle));
}

const std::set<std::string>& DependencyGraph::preconditions(const std::string& node) const {
  auto it = edges_.find(node);
  if (it == edges_.end()) throw UnknownNode(node);
  return it->second;
}

std::set<std::string> DependencyGraph::dependents(const std::string& node) const {
  std::set<std::string> out;
  for (const auto& [n, pre] : edges_) {
    if (pre.contains(node)) out.insert(n);
  }
  return out;
}

DependencyGraph build_dependency_graph(const PdlDocument& doc) {
  std::set<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;
  for (const auto* def : doc.all_nodes()) {
    nodes.insert(def->name);
    auto& pre = edges[def->name];
    pre.insert(def->preconditions.begin(), def->preconditions.end());
  }
  return DependencyGraph(std::move(nodes), std::move(edges));
}

Accessibility accessible_nodes(const DependencyGraph& graph, const std::set<std::string>& executed) {
  for (const auto& e : executed) {
    if (!graph.contains(e)) throw UnknownNode(e);
  }
  Accessibility out;
  for (const auto& [node, pre] : graph.edges()) {
    std::set<std::string> unmet;
    for (const auto& p : pre) {
      if (!executed.contains(p)) unmet.insert(p);
    }
    if (unmet.empty()) {
      out.accessible.insert(node);
    } else {
      out.blocked.emplace(node, std::move(unmet));
    }
  }
  return out;
}

std::vector<std::string> topological_order(const DependencyGraph& graph) {
  std::map<std::string, std::size_t> remaining;
  for (const auto& [node, pre] : graph.edges()) remaining[node] = pre.size();
  std::set<std::string> ready;
  for (const auto& [node, count] : remaining) {
    if (count == 0) ready.insert(node);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string node = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(node);
    for (const auto& d : graph.dependents(node)) {
      if (--remaining[d] == 0) ready.insert(d);
    }
  }
  return order;
}

std::vector<std::string> find_cycle(const std::map<std::string, std::set<std::string>>& edges) {
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::vector<std::string> found;

  std::function<bool(const std::string&)> visit = [&](const std::string& node) {
    mark[node] = Mark::Grey;
    stack.push_back(node);
    auto it = edges.find(node);
    if (it != edges.end()) {
      for (const auto& next : it->second) {
        if (!edges.contains(next)) continue;
        auto m = mark[next];
        if (m == Mark::Grey) {
          auto start = std::find(stack.begin(), stack.end(), next);
          found.assign(start, stack.end());
          found.push_back(next);
          return true;
        }
        if (m == Mark::White && visit(next)) return true;
      }
    }
    stack.pop_back();
    mark[node] = Mark::Black;
    return false;
  };

  for (const auto& [node, _] : edges) {
    if (mark[node] == Mark::White && visit(node)) return found;
  }
  return {};
}

}  // namespace flowagent::pdl
