#pragma once

#include <string>

#include "flowagent/pdl/document.hpp"

namespace flowagent::pdl {

// Canonical PDL text: meta, APIs, ANSWERs, Procedure. Parsing the output
// yields a document structurally equal to `doc`, and rendering that again
// reproduces the same bytes.
std::string render_for_prompt(const PdlDocument& doc);

}  // namespace flowagent::pdl
