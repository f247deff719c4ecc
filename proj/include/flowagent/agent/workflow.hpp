#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flowagent/pdl/diagnostic.hpp"
#include "flowagent/pdl/document.hpp"
#include "flowagent/pdl/graph.hpp"

namespace flowagent::agent {

// A validated PDL document together with its compiled dependency graph.
struct Workflow {
  pdl::PdlDocument doc;
  pdl::DependencyGraph graph;
  std::string source;
  std::string content_hash;  // sha256 hex of `source`
  std::vector<pdl::Diagnostic> warnings;

  // Short content-addressed id (first 12 hex digits of the hash).
  std::string id() const { return content_hash.substr(0, 12); }
};

std::string sha256_hex(std::string_view data);

// Parses and validates; throws pdl::InvalidDocument when any Error is found.
std::shared_ptr<const Workflow> load_workflow(std::string source);
std::shared_ptr<const Workflow> load_workflow_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace flowagent::agent
