#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "flowagent/pdl/document.hpp"

namespace flowagent::baselines {

enum class WorkflowFormat { NL, Code, Flowchart, PDL };

const char* to_string(WorkflowFormat format);

struct RenderedWorkflow {
  WorkflowFormat format = WorkflowFormat::PDL;
  std::string text;

  bool operator==(const RenderedWorkflow&) const = default;
};

// Numbered steps (1., 1.1., ...) walked from the procedure, followed by the
// node list with descriptions and preconditions.
RenderedWorkflow render_nl(const pdl::PdlDocument& doc);

// Python stubs, one per API node, plus the procedure as a function body.
RenderedWorkflow render_code(const pdl::PdlDocument& doc);

// Mermaid `flowchart TD`: solid edges for preconditions ("a --> b" when a is
// a precondition of b), dotted labeled edges for procedure control flow.
RenderedWorkflow render_flowchart(const pdl::PdlDocument& doc);

RenderedWorkflow render_workflow(const pdl::PdlDocument& doc, WorkflowFormat format);

}  // namespace flowagent::baselines
