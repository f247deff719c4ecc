#include "flowagent/pdl/diagnostic.hpp"

#include <algorithm>
#include <sstream>

namespace flowagent::pdl {

const char* to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

nlohmann::json to_json(const Diagnostic& diagnostic) {
  return nlohmann::json{{"severity", to_string(diagnostic.severity)},
                        {"code", diagnostic.code},
                        {"message", diagnostic.message},
                        {"line", diagnostic.location.line},
                        {"col", diagnostic.location.column}};
}

nlohmann::json to_json(std::span<const Diagnostic> diagnostics) {
  auto out = nlohmann::json::array();
  for (const auto& d : diagnostics) out.push_back(to_json(d));
  return out;
}

std::string format_diagnostic(const Diagnostic& diagnostic, const std::string& file) {
  std::ostringstream os;
  if (!file.empty()) os << file << ':';
  os << diagnostic.location.line << ':' << diagnostic.location.column << ": "
     << to_string(diagnostic.severity) << '[' << diagnostic.code << "]: " << diagnostic.message;
  return os.str();
}

namespace {
std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return "invalid PDL document: " + format_diagnostic(d);
  }
  return "invalid PDL document";
}
}  // namespace

InvalidDocument::InvalidDocument(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace flowagent::pdl
