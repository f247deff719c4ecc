#pragma once

#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "flowagent/pdl/diagnostic.hpp"

namespace flowagent::pdl {

// Copyable owning pointer used to make the recursive AST a value type.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class NodeNamespace {
  Api,
  Answer,
  Unqualified,  // bare `name(...)` call; resolved against both node kinds
};

enum class CompareOp { Eq, Ne, Gt, Lt, Ge, Le };

const char* to_string(CompareOp op);
const char* to_string(NodeNamespace ns);

struct Expr;

struct Identifier {
  std::string name;
  bool operator==(const Identifier&) const = default;
};

struct StringLit {
  std::string value;
  char quote = '"';
  bool operator==(const StringLit&) const = default;
};

struct NumberLit {
  std::string text;
  bool operator==(const NumberLit&) const = default;
};

struct BoolLit {
  bool value = false;
  bool capitalized = false;  // `True` vs `true`
  bool operator==(const BoolLit&) const = default;
};

// `...` placeholder for elided arguments.
struct EllipsisLit {
  bool operator==(const EllipsisLit&) const = default;
};

struct NodeCall {
  NodeNamespace ns = NodeNamespace::Api;
  std::string name;
  std::vector<Expr> args;
  SourceLocation location;  // not part of structural equality

  bool operator==(const NodeCall& other) const;
};

struct Compare {
  CompareOp op = CompareOp::Eq;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Compare&) const = default;
};

struct Not {
  Box<Expr> operand;
  bool operator==(const Not&) const = default;
};

struct And {
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const And&) const = default;
};

struct Or {
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Or&) const = default;
};

struct BracketList {
  std::vector<Expr> items;
  bool operator==(const BracketList&) const = default;
};

struct Expr {
  using Variant = std::variant<Identifier, StringLit, NumberLit, BoolLit, EllipsisLit, NodeCall,
                               Compare, Not, And, Or, BracketList>;
  Variant node;

  template <typename T>
    requires std::is_constructible_v<Variant, T>
  Expr(T value) : node(std::move(value)) {}  // NOLINT(implicit)

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(node);
  }

  bool operator==(const Expr&) const = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
  std::vector<std::string> targets;
  bool bracketed = false;  // `[a, b] = ...` rather than `a, b = ...`
  Expr value;
  bool operator==(const Assign&) const = default;
};

struct IfBranch {
  Expr condition;
  Block body;
  bool operator==(const IfBranch&) const = default;
};

struct If {
  std::vector<IfBranch> branches;  // `if` then each `elif`
  std::optional<Block> else_block;
  bool operator==(const If&) const = default;
};

struct While {
  Expr condition;
  Block body;
  bool operator==(const While&) const = default;
};

struct TryExcept {
  Block try_block;
  std::optional<std::string> exception;  // `except Name:`; empty for bare `except:`
  Block except_block;
  bool operator==(const TryExcept&) const = default;
};

struct ExprStmt {
  Expr expr;
  bool operator==(const ExprStmt&) const = default;
};

struct Comment {
  std::string text;  // without the leading '#'
  bool operator==(const Comment&) const = default;
};

struct Stmt {
  using Variant = std::variant<Assign, If, While, TryExcept, ExprStmt, Comment>;
  Variant node;
  std::optional<std::string> trailing_comment;
  int line = 0;  // not part of structural equality

  template <typename T>
    requires std::is_constructible_v<Variant, T>
  Stmt(T value, int source_line = 0) : node(std::move(value)), line(source_line) {}  // NOLINT

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(node);
  }

  bool operator==(const Stmt& other) const {
    return node == other.node && trailing_comment == other.trailing_comment;
  }
};

struct ProcedureAst {
  Block statements;
  bool operator==(const ProcedureAst&) const = default;
};

// Node calls in source order; an outer call precedes calls in its arguments.
void collect_calls(const Expr& expr, std::vector<const NodeCall*>& out);
void collect_calls(const Block& block, std::vector<const NodeCall*>& out);
// Every identifier mentioned in the block, including assignment targets.
void collect_identifiers(const Block& block, std::vector<std::string>& out);

// Depth of the deepest nested block; a flat procedure has depth 1.
int nesting_depth(const Block& block);

// Pretty-printer: canonical pythonic source for an expression / procedure.
std::string render_expr(const Expr& expr);
std::string render_procedure(const ProcedureAst& ast, int indent_width = 2);

}  // namespace flowagent::pdl
