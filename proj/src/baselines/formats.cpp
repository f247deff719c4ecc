#include "flowagent/baselines/formats.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "flowagent/pdl/render.hpp"

namespace flowagent::baselines {

namespace {

using namespace pdl;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

NodeKind resolve_kind(const PdlDocument& doc, const NodeCall& call) {
  if (call.ns == NodeNamespace::Api) return NodeKind::Api;
  if (call.ns == NodeNamespace::Answer) return NodeKind::Answer;
  return doc.find_answer(call.name) ? NodeKind::Answer : NodeKind::Api;
}

std::string render_args(const std::vector<Expr>& args) {
  std::vector<std::string> parts;
  for (const auto& a : args) {
    if (a.is<BracketList>()) {
      for (const auto& item : a.as<BracketList>().items) parts.push_back(render_expr(item));
    } else {
      parts.push_back(render_expr(a));
    }
  }
  return join(parts);
}

// ---- natural language ------------------------------------------------------

class NlWriter {
 public:
  explicit NlWriter(const PdlDocument& doc) : doc_(doc) {}

  // Branches of one if/elif/else share a counter so sub-steps stay unique.
  void block(const Block& stmts, const std::string& prefix, int depth, int& counter) {
    for (const auto& stmt : stmts) {
      const std::string number = prefix + std::to_string(++counter) + ".";
      const std::string indent(static_cast<std::size_t>(depth) * 3, ' ');
      const std::string cont = indent + std::string(number.size() + 1, ' ');
      auto first = [&](const std::string& text) { out_ << indent << number << ' ' << text << '\n'; };
      auto more = [&](const std::string& text) { out_ << cont << text << '\n'; };
      int children = 0;
      std::visit(Overloaded{
                     [&](const Assign& a) { first(assign_text(a)); },
                     [&](const ExprStmt& e) { first(expr_text(e.expr)); },
                     [&](const Comment& c) { first("Note: " + trim(c.text)); },
                     [&](const If& s) {
                       for (std::size_t i = 0; i < s.branches.size(); ++i) {
                         const auto& b = s.branches[i];
                         const std::string head = "if " + render_expr(b.condition) + ":";
                         if (i == 0) {
                           first("I" + head.substr(1));
                         } else {
                           more("Otherwise, " + head);
                         }
                         block(b.body, number, depth + 1, children);
                       }
                       if (s.else_block) {
                         more("Otherwise:");
                         block(*s.else_block, number, depth + 1, children);
                       }
                     },
                     [&](const While& w) {
                       first("Repeat while " + render_expr(w.condition) + ":");
                       block(w.body, number, depth + 1, children);
                     },
                     [&](const TryExcept& t) {
                       first("Try the following:");
                       block(t.try_block, number, depth + 1, children);
                       more("If that fails:");
                       block(t.except_block, number, depth + 1, children);
                     },
                 },
                 stmt.node);
      if (stmt.trailing_comment) more("(Note: " + trim(*stmt.trailing_comment) + ")");
    }
  }

  std::string str() const { return out_.str(); }

 private:
  std::string call_text(const NodeCall& call) {
    const NodeDef* def = doc_.find_node(call.name);
    const std::string args = render_args(call.args);
    if (resolve_kind(doc_, call) == NodeKind::Api) {
      std::string out = "Call the API " + call.name;
      if (!args.empty()) out += " with " + args;
      return out;
    }
    std::string out = "Respond to the user with " + call.name;
    if (!args.empty()) out += " (about " + args + ")";
    if (def && def->desc && !def->desc->empty()) out += ": \"" + *def->desc + "\"";
    return out;
  }

  std::string expr_text(const Expr& e) {
    if (e.is<NodeCall>()) return call_text(e.as<NodeCall>()) + ".";
    return "Evaluate " + render_expr(e) + ".";
  }

  std::string assign_text(const Assign& a) {
    const std::string targets = join(a.targets);
    if (a.value.is<NodeCall>()) {
      const auto& call = a.value.as<NodeCall>();
      if (resolve_kind(doc_, call) == NodeKind::Api) {
        return call_text(call) + " to obtain " + targets + ".";
      }
      return call_text(call) + ", and record the user's reply as " + targets + ".";
    }
    return "Set " + targets + " to " + render_expr(a.value) + ".";
  }

  const PdlDocument& doc_;
  std::ostringstream out_;
};

// ---- flowchart -------------------------------------------------------------

class FlowWriter {
 public:
  explicit FlowWriter(const PdlDocument& doc) : doc_(doc) {}

  std::vector<std::string> walk(const Block& stmts, std::vector<std::string> preds,
                                std::optional<std::string> label) {
    for (const auto& stmt : stmts) {
      std::visit(Overloaded{
                     [&](const Assign& a) { preds = visit_calls(a.value, preds, label); },
                     [&](const ExprStmt& e) { preds = visit_calls(e.expr, preds, label); },
                     [](const Comment&) {},
                     [&](const If& s) {
                       std::vector<std::string> outs;
                       auto current = preds;
                       for (const auto& b : s.branches) {
                         current = visit_calls(b.condition, current, label);
                         label.reset();
                         merge(outs, walk(b.body, current, render_expr(b.condition)));
                       }
                       if (s.else_block) {
                         merge(outs, walk(*s.else_block, current, std::string("otherwise")));
                       } else {
                         merge(outs, current);
                       }
                       preds = outs;
                     },
                     [&](const While& w) {
                       preds = visit_calls(w.condition, preds, label);
                       label.reset();
                       auto body = walk(w.body, preds, "while " + render_expr(w.condition));
                       merge(preds, body);
                     },
                     [&](const TryExcept& t) {
                       auto tried = walk(t.try_block, preds, label);
                       label.reset();
                       auto start = preds;
                       merge(start, tried);
                       auto handled = walk(t.except_block, start, std::string("on failure"));
                       preds = tried;
                       merge(preds, handled);
                     },
                 },
                 stmt.node);
      if (!std::holds_alternative<Comment>(stmt.node)) label.reset();
    }
    return preds;
  }

  const std::vector<std::string>& edges() const { return edges_; }

 private:
  static void merge(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& f : from) {
      if (std::find(into.begin(), into.end(), f) == into.end()) into.push_back(f);
    }
  }

  std::vector<std::string> visit_calls(const Expr& e, std::vector<std::string> preds,
                                       std::optional<std::string>& label) {
    std::vector<const NodeCall*> calls;
    collect_calls(e, calls);
    for (const auto* c : calls) {
      for (const auto& p : preds) add_edge(p, c->name, label);
      label.reset();
      preds = {c->name};
    }
    return preds;
  }

  void add_edge(const std::string& from, const std::string& to, const std::optional<std::string>& label) {
    std::string edge = "    " + from + " -.->";
    if (label) {
      std::string text = *label;
      std::string escaped;
      for (char c : text) escaped += c == '"' ? std::string("#quot;") : std::string(1, c);
      edge += "|\"" + escaped + "\"|";
    }
    edge += " " + to;
    if (std::find(edges_.begin(), edges_.end(), edge) == edges_.end()) edges_.push_back(edge);
  }

  const PdlDocument& doc_;
  std::vector<std::string> edges_;
};

std::string node_summary(const NodeDef& node) {
  std::string out = "- " + std::string(node.kind == NodeKind::Api ? "API " : "Answer ") + node.name;
  if (node.desc && !node.desc->empty()) out += ": " + *node.desc;
  if (!node.request_slots.empty()) out += " Inputs: " + join(node.request_slots) + ".";
  if (!node.response_slots.empty()) out += " Outputs: " + join(node.response_slots) + ".";
  if (!node.preconditions.empty()) out += " Only after: " + join(node.preconditions) + ".";
  return out;
}

}  // namespace

const char* to_string(WorkflowFormat format) {
  switch (format) {
    case WorkflowFormat::NL: return "nl";
    case WorkflowFormat::Code: return "code";
    case WorkflowFormat::Flowchart: return "flowchart";
    case WorkflowFormat::PDL: return "pdl";
  }
  return "?";
}

RenderedWorkflow render_nl(const PdlDocument& doc) {
  std::string out = "Workflow: " + doc.name + "\n" + doc.desc + "\n";
  if (doc.detailed_desc) out += *doc.detailed_desc + "\n";
  NlWriter writer(doc);
  int steps = 0;
  writer.block(doc.procedure_ast.statements, "", 0, steps);
  out += "\nSteps:\n" + writer.str();
  out += "\nActions:\n";
  for (const auto* node : doc.all_nodes()) out += node_summary(*node) + "\n";
  return {WorkflowFormat::NL, out};
}

RenderedWorkflow render_code(const PdlDocument& doc) {
  std::string out = "# " + doc.name + ": " + doc.desc + "\n";
  if (doc.detailed_desc) out += "# " + *doc.detailed_desc + "\n";
  for (const auto& node : doc.api_nodes) {
    out += "\ndef " + node.name + "(" + join(node.request_slots) + "):\n";
    std::vector<std::string> notes;
    if (node.desc && !node.desc->empty()) notes.push_back(*node.desc);
    if (!node.response_slots.empty()) notes.push_back("Returns: " + join(node.response_slots) + ".");
    if (!node.preconditions.empty()) notes.push_back("Requires: " + join(node.preconditions) + ".");
    if (!notes.empty()) out += "    \"\"\"" + join(notes, " ") + "\"\"\"\n";
    out += "    ...\n";
  }
  if (!doc.answer_nodes.empty()) {
    out += "\n# Answers\n";
    for (const auto& node : doc.answer_nodes) {
      out += "# " + node.name;
      if (node.desc && !node.desc->empty()) out += ": " + *node.desc;
      if (!node.preconditions.empty()) out += " (requires: " + join(node.preconditions) + ")";
      out += "\n";
    }
  }
  out += "\n\ndef procedure():\n";
  std::istringstream body(render_procedure(doc.procedure_ast, 4));
  std::string line;
  while (std::getline(body, line)) out += line.empty() ? "\n" : "    " + line + "\n";
  return {WorkflowFormat::Code, out};
}

RenderedWorkflow render_flowchart(const PdlDocument& doc) {
  std::string out = "flowchart TD\n";
  for (const auto* node : doc.all_nodes()) {
    out += "    " + node->name + "[\"" + (node->kind == NodeKind::Api ? "API " : "ANSWER ") +
           node->name + "\"]\n";
  }
  for (const auto* node : doc.all_nodes()) {
    for (const auto& pre : node->preconditions) out += "    " + pre + " --> " + node->name + "\n";
  }
  FlowWriter writer(doc);
  writer.walk(doc.procedure_ast.statements, {}, std::nullopt);
  if (!writer.edges().empty()) {
    out += "    %% procedure control flow\n";
    for (const auto& e : writer.edges()) out += e + "\n";
  }
  return {WorkflowFormat::Flowchart, out};
}

RenderedWorkflow render_workflow(const PdlDocument& doc, WorkflowFormat format) {
  switch (format) {
    case WorkflowFormat::NL: return render_nl(doc);
    case WorkflowFormat::Code: return render_code(doc);
    case WorkflowFormat::Flowchart: return render_flowchart(doc);
    case WorkflowFormat::PDL: break;
  }
  return {WorkflowFormat::PDL, render_for_prompt(doc)};
}

}  // namespace flowagent::baselines
