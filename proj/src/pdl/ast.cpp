#include "flowagent/pdl/ast.hpp"

#include <algorithm>
#include <sstream>

namespace flowagent::pdl {

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Gt: return ">";
    case CompareOp::Lt: return "<";
    case CompareOp::Ge: return ">=";
    case CompareOp::Le: return "<=";
  }
  return "?";
}

const char* to_string(NodeNamespace ns) {
  switch (ns) {
    case NodeNamespace::Api: return "API";
    case NodeNamespace::Answer: return "ANSWER";
    case NodeNamespace::Unqualified: return "";
  }
  return "";
}

bool NodeCall::operator==(const NodeCall& other) const {
  return ns == other.ns && name == other.name && args == other.args;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void collect_calls(const Expr& expr, std::vector<const NodeCall*>& out) {
  std::visit(Overloaded{
                 [&](const NodeCall& call) {
                   out.push_back(&call);
                   for (const auto& arg : call.args) collect_calls(arg, out);
                 },
                 [&](const Compare& c) {
                   collect_calls(*c.lhs, out);
                   collect_calls(*c.rhs, out);
                 },
                 [&](const Not& n) { collect_calls(*n.operand, out); },
                 [&](const And& a) {
                   collect_calls(*a.lhs, out);
                   collect_calls(*a.rhs, out);
                 },
                 [&](const Or& o) {
                   collect_calls(*o.lhs, out);
                   collect_calls(*o.rhs, out);
                 },
                 [&](const BracketList& list) {
                   for (const auto& item : list.items) collect_calls(item, out);
                 },
                 [](const auto&) {},
             },
             expr.node);
}

void collect_calls(const Block& block, std::vector<const NodeCall*>& out) {
  for (const auto& stmt : block) {
    std::visit(Overloaded{
                   [&](const Assign& a) { collect_calls(a.value, out); },
                   [&](const If& s) {
                     for (const auto& branch : s.branches) {
                       collect_calls(branch.condition, out);
                       collect_calls(branch.body, out);
                     }
                     if (s.else_block) collect_calls(*s.else_block, out);
                   },
                   [&](const While& w) {
                     collect_calls(w.condition, out);
                     collect_calls(w.body, out);
                   },
                   [&](const TryExcept& t) {
                     collect_calls(t.try_block, out);
                     collect_calls(t.except_block, out);
                   },
                   [&](const ExprStmt& e) { collect_calls(e.expr, out); },
                   [](const Comment&) {},
               },
               stmt.node);
  }
}

namespace {

void collect_expr_identifiers(const Expr& expr, std::vector<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Identifier& id) { out.push_back(id.name); },
                 [&](const NodeCall& call) {
                   for (const auto& arg : call.args) collect_expr_identifiers(arg, out);
                 },
                 [&](const Compare& c) {
                   collect_expr_identifiers(*c.lhs, out);
                   collect_expr_identifiers(*c.rhs, out);
                 },
                 [&](const Not& n) { collect_expr_identifiers(*n.operand, out); },
                 [&](const And& a) {
                   collect_expr_identifiers(*a.lhs, out);
                   collect_expr_identifiers(*a.rhs, out);
                 },
                 [&](const Or& o) {
                   collect_expr_identifiers(*o.lhs, out);
                   collect_expr_identifiers(*o.rhs, out);
                 },
                 [&](const BracketList& list) {
                   for (const auto& item : list.items) collect_expr_identifiers(item, out);
                 },
                 // Quoted slot names, as in `request_information('hospital')`.
                 [&](const StringLit& s) { out.push_back(s.value); },
                 [](const auto&) {},
             },
             expr.node);
}

}  // namespace

void collect_identifiers(const Block& block, std::vector<std::string>& out) {
  for (const auto& stmt : block) {
    std::visit(Overloaded{
                   [&](const Assign& a) {
                     out.insert(out.end(), a.targets.begin(), a.targets.end());
                     collect_expr_identifiers(a.value, out);
                   },
                   [&](const If& s) {
                     for (const auto& branch : s.branches) {
                       collect_expr_identifiers(branch.condition, out);
                       collect_identifiers(branch.body, out);
                     }
                     if (s.else_block) collect_identifiers(*s.else_block, out);
                   },
                   [&](const While& w) {
                     collect_expr_identifiers(w.condition, out);
                     collect_identifiers(w.body, out);
                   },
                   [&](const TryExcept& t) {
                     collect_identifiers(t.try_block, out);
                     collect_identifiers(t.except_block, out);
                   },
                   [&](const ExprStmt& e) { collect_expr_identifiers(e.expr, out); },
                   [](const Comment&) {},
               },
               stmt.node);
  }
}

int nesting_depth(const Block& block) {
  int deepest = 0;
  for (const auto& stmt : block) {
    int inner = std::visit(Overloaded{
                               [](const If& s) {
                                 int d = 0;
                                 for (const auto& b : s.branches) d = std::max(d, nesting_depth(b.body));
                                 if (s.else_block) d = std::max(d, nesting_depth(*s.else_block));
                                 return d;
                               },
                               [](const While& w) { return nesting_depth(w.body); },
                               [](const TryExcept& t) {
                                 return std::max(nesting_depth(t.try_block),
                                                 nesting_depth(t.except_block));
                               },
                               [](const auto&) { return 0; },
                           },
                           stmt.node);
    deepest = std::max(deepest, inner);
  }
  return block.empty() ? 0 : deepest + 1;
}

namespace {

// Binding strength, loosest first.
enum Precedence { kOr = 1, kAnd = 2, kNot = 3, kCompare = 4, kAtom = 5 };

int precedence(const Expr& expr) {
  if (expr.is<Or>()) return kOr;
  if (expr.is<And>()) return kAnd;
  if (expr.is<Not>()) return kNot;
  if (expr.is<Compare>()) return kCompare;
  return kAtom;
}

std::string quote_string(const StringLit& s) {
  std::string out(1, s.quote);
  for (char c : s.value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c == s.quote) out += '\\';
        out += c;
    }
  }
  out += s.quote;
  return out;
}

std::string render_at(const Expr& expr, int min_prec);

std::string render_list(const std::vector<Expr>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += render_at(items[i], kOr);
  }
  return out;
}

std::string render_at(const Expr& expr, int min_prec) {
  std::string text = std::visit(
      Overloaded{
          [](const Identifier& id) { return id.name; },
          [](const StringLit& s) { return quote_string(s); },
          [](const NumberLit& n) { return n.text; },
          [](const BoolLit& b) -> std::string {
            if (b.capitalized) return b.value ? "True" : "False";
            return b.value ? "true" : "false";
          },
          [](const EllipsisLit&) -> std::string { return "..."; },
          [](const NodeCall& call) {
            std::string prefix = to_string(call.ns);
            if (!prefix.empty()) prefix += '.';
            return prefix + call.name + "(" + render_list(call.args) + ")";
          },
          [](const Compare& c) {
            return render_at(*c.lhs, kAtom) + " " + to_string(c.op) + " " + render_at(*c.rhs, kAtom);
          },
          [](const Not& n) { return "not " + render_at(*n.operand, kNot); },
          [](const And& a) { return render_at(*a.lhs, kAnd) + " and " + render_at(*a.rhs, kNot); },
          [](const Or& o) { return render_at(*o.lhs, kOr) + " or " + render_at(*o.rhs, kAnd); },
          [](const BracketList& list) { return "[" + render_list(list.items) + "]"; },
      },
      expr.node);
  if (precedence(expr) < min_prec) return "(" + text + ")";
  return text;
}

void render_block(const Block& block, int depth, int width, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(depth * width), ' ');
  for (const auto& stmt : block) {
    auto trailing = [&] {
      if (stmt.trailing_comment) os << "  #" << *stmt.trailing_comment;
      os << '\n';
    };
    std::visit(Overloaded{
                   [&](const Assign& a) {
                     os << pad;
                     std::string targets;
                     for (std::size_t i = 0; i < a.targets.size(); ++i) {
                       if (i) targets += ", ";
                       targets += a.targets[i];
                     }
                     os << (a.bracketed ? "[" + targets + "]" : targets) << " = "
                        << render_at(a.value, kOr);
                     trailing();
                   },
                   [&](const If& s) {
                     for (std::size_t i = 0; i < s.branches.size(); ++i) {
                       os << pad << (i == 0 ? "if " : "elif ")
                          << render_at(s.branches[i].condition, kOr) << ':';
                       if (i == 0) {
                         trailing();
                       } else {
                         os << '\n';
                       }
                       render_block(s.branches[i].body, depth + 1, width, os);
                     }
                     if (s.else_block) {
                       os << pad << "else:\n";
                       render_block(*s.else_block, depth + 1, width, os);
                     }
                   },
                   [&](const While& w) {
                     os << pad << "while " << render_at(w.condition, kOr) << ':';
                     trailing();
                     render_block(w.body, depth + 1, width, os);
                   },
                   [&](const TryExcept& t) {
                     os << pad << "try:";
                     trailing();
                     render_block(t.try_block, depth + 1, width, os);
                     os << pad << "except";
                     if (t.exception) os << ' ' << *t.exception;
                     os << ":\n";
                     render_block(t.except_block, depth + 1, width, os);
                   },
                   [&](const ExprStmt& e) {
                     os << pad << render_at(e.expr, kOr);
                     trailing();
                   },
                   [&](const Comment& c) { os << pad << '#' << c.text << '\n'; },
               },
               stmt.node);
  }
}

}  // namespace

std::string render_expr(const Expr& expr) { return render_at(expr, kOr); }

std::string render_procedure(const ProcedureAst& ast, int indent_width) {
  std::ostringstream os;
  render_block(ast.statements, 0, indent_width, os);
  return os.str();
}

}  // namespace flowagent::pdl
