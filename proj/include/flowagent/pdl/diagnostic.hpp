#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace flowagent::pdl {

enum class Severity { Error, Warning };

struct SourceLocation {
  int line = 0;    // 1-based; 0 means "no location"
  int column = 0;  // 1-based

  bool operator==(const SourceLocation&) const = default;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceLocation location;

  bool operator==(const Diagnostic&) const = default;
};

// Diagnostic codes emitted by the parser and validator.
namespace codes {
inline constexpr const char* kSyntax = "syntax-error";
inline constexpr const char* kIndentation = "indentation-error";
inline constexpr const char* kMissingProcedure = "missing-procedure";
inline constexpr const char* kMissingName = "missing-name";
inline constexpr const char* kUnknownField = "unknown-field";
inline constexpr const char* kElision = "elided-content";
inline constexpr const char* kAnswerResponseSlots = "answer-response-slots";
inline constexpr const char* kDuplicateNode = "duplicate-node";
inline constexpr const char* kUnknownPrecondition = "unknown-precondition";
inline constexpr const char* kUnknownNodeReference = "unknown-node-reference";
inline constexpr const char* kCycle = "cycle";
inline constexpr const char* kUnusedNode = "unused-node";
inline constexpr const char* kUnusedSlot = "unused-slot";
}  // namespace codes

const char* to_string(Severity severity);

bool has_errors(std::span<const Diagnostic> diagnostics);

// {severity, code, message, line, col}
nlohmann::json to_json(const Diagnostic& diagnostic);
nlohmann::json to_json(std::span<const Diagnostic> diagnostics);

// "file:line:col: error[code]: message"
std::string format_diagnostic(const Diagnostic& diagnostic, const std::string& file = {});

// Thrown when a document with Error diagnostics is handed to code that
// requires a valid workflow.
class InvalidDocument : public std::runtime_error {
 public:
  explicit InvalidDocument(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace flowagent::pdl
