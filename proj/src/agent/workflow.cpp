#include "flowagent/agent/workflow.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "flowagent/pdl/parser.hpp"
#include "flowagent/pdl/validate.hpp"

namespace flowagent::agent {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const Workflow> load_workflow(std::string source) {
  auto parsed = pdl::parse_pdl(source);
  if (!parsed.value) throw pdl::InvalidDocument(std::move(parsed.diagnostics));
  auto diagnostics = std::move(parsed.diagnostics);
  auto checks = pdl::validate(*parsed.value);
  diagnostics.insert(diagnostics.end(), checks.begin(), checks.end());
  if (pdl::has_errors(diagnostics)) throw pdl::InvalidDocument(std::move(diagnostics));

  auto wf = std::make_shared<Workflow>();
  wf->graph = pdl::build_dependency_graph(*parsed.value);
  wf->doc = std::move(*parsed.value);
  wf->content_hash = sha256_hex(source);
  wf->source = std::move(source);
  wf->warnings = std::move(diagnostics);
  return wf;
}

std::shared_ptr<const Workflow> load_workflow_file(const std::filesystem::path& path) {
  return load_workflow(read_file(path));
}

}  // namespace flowagent::agent
