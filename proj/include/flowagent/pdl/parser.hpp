#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "flowagent/pdl/ast.hpp"
#include "flowagent/pdl/diagnostic.hpp"
#include "flowagent/pdl/document.hpp"

namespace flowagent::pdl {

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;  // warnings may accompany a value

  bool ok() const { return value.has_value(); }
};

// Parses the pythonic procedure block. `line_offset`/`column_offset` shift
// diagnostic locations into the enclosing document.
ParseResult<ProcedureAst> parse_procedure(std::string_view source, int line_offset = 0,
                                          int column_offset = 0);

// Parses a whole PDL document (meta information, APIs, ANSWERs, Procedure).
// Cross-reference checks are left to validate().
ParseResult<PdlDocument> parse_pdl(std::string_view source);

}  // namespace flowagent::pdl
