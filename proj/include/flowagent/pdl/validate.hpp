#pragma once

#include <string_view>
#include <vector>

#include "flowagent/pdl/diagnostic.hpp"
#include "flowagent/pdl/document.hpp"

namespace flowagent::pdl {

// Cross-reference and well-formedness checks. Errors: duplicate node names,
// unknown preconditions, call sites naming undeclared nodes, precondition
// cycles. Warnings: nodes never referenced by the procedure, unused slots.
std::vector<Diagnostic> validate(const PdlDocument& doc);

// Parser diagnostics followed by validate() when parsing produced a document.
std::vector<Diagnostic> check_source(std::string_view source);

}  // namespace flowagent::pdl
