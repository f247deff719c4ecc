#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flowagent/agent/workflow.hpp"

namespace flowagent::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(FLOWAGENT_TEST_DIR) / "fixtures" / name;
}

inline std::string read_fixture(const std::string& name) { return agent::read_file(fixture(name)); }

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(FLOWAGENT_TEST_DIR) / "golden" / name;
}

// Fresh scratch directory under the build tree, emptied first.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("flowagent_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Random acyclic workflow: API node i may require any API node j < i, ANSWER
// nodes may require any API node. Names are shuffled so that lexicographic
// order is unrelated to the dependency order.
struct RandomWorkflow {
  std::string source;
  std::vector<std::string> apis;     // dependency order
  std::vector<std::string> answers;
  std::map<std::string, std::set<std::string>> pre;  // every node has an entry

  std::vector<std::string> all_nodes() const {
    auto out = apis;
    out.insert(out.end(), answers.begin(), answers.end());
    return out;
  }
};

inline RandomWorkflow random_workflow(std::mt19937_64& rng, int max_nodes = 8, double edge_prob = 0.35) {
  std::uniform_int_distribution<int> total_dist(1, max_nodes);
  const int total = total_dist(rng);
  std::uniform_int_distribution<int> answer_dist(0, std::min(2, total - 1));
  const int n_answers = answer_dist(rng);
  const int n_apis = total - n_answers;
  std::bernoulli_distribution edge(edge_prob);

  std::vector<std::string> names;
  for (int i = 0; i < total; ++i) names.push_back("node_" + std::string(1, static_cast<char>('a' + i)));
  std::shuffle(names.begin(), names.end(), rng);

  RandomWorkflow wf;
  wf.apis.assign(names.begin(), names.begin() + n_apis);
  wf.answers.assign(names.begin() + n_apis, names.end());
  for (int i = 0; i < n_apis; ++i) {
    auto& pre = wf.pre[wf.apis[i]];
    for (int j = 0; j < i; ++j) {
      if (edge(rng)) pre.insert(wf.apis[j]);
    }
  }
  for (const auto& a : wf.answers) {
    auto& pre = wf.pre[a];
    for (const auto& api : wf.apis) {
      if (edge(rng)) pre.insert(api);
    }
  }

  auto list = [](const std::set<std::string>& items) {
    std::string out = "[";
    for (const auto& s : items) out += (out.size() > 1 ? ", " : "") + s;
    return out + "]";
  };
  std::string src = "Name: Random workflow\nDesc: Generated for property tests.\n\nAPIs:\n";
  for (const auto& api : wf.apis) {
    src += "  - name: " + api + "\n    request: []\n    response: []\n    precondition: " + list(wf.pre[api]) + "\n";
  }
  if (wf.answers.empty()) src += "\nANSWERs: []\n";
  else src += "\nANSWERs:\n";
  for (const auto& a : wf.answers) {
    src += "  - name: " + a + "\n    desc: Done with " + a + ".\n";
    if (!wf.pre[a].empty()) src += "    precondition: " + list(wf.pre[a]) + "\n";
  }
  src += "\nProcedure: |\n";
  for (const auto& api : wf.apis) src += "  API." + api + "()\n";
  for (const auto& a : wf.answers) src += "  ANSWER." + a + "()\n";
  wf.source = std::move(src);
  return wf;
}

// Oracle: a node is accessible iff every precondition is in `executed`,
// checked by direct subset inclusion.
inline std::set<std::string> brute_force_accessible(const std::map<std::string, std::set<std::string>>& pre,
                                                    const std::set<std::string>& executed) {
  std::set<std::string> out;
  for (const auto& [node, reqs] : pre) {
    if (std::includes(executed.begin(), executed.end(), reqs.begin(), reqs.end())) out.insert(node);
  }
  return out;
}

}  // namespace flowagent::testing
