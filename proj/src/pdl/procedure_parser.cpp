#include <algorithm>
#include <set>

#include "flowagent/pdl/parser.hpp"
#include "procedure_lexer.hpp"

namespace flowagent::pdl {

namespace {

using detail::Token;
using detail::TokenKind;

const std::set<std::string, std::less<>> kKeywords = {"if",  "elif", "else", "while", "try",
                                                      "except", "not", "and", "or"};

struct ParseFailure {
  Diagnostic diagnostic;
};

class ProcedureParser {
 public:
  explicit ProcedureParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Block parse_top() { return parse_block(true); }
  std::vector<Diagnostic>& diagnostics() { return diagnostics_; }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    auto i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_op(std::string_view op) const { return peek().kind == TokenKind::Op && peek().text == op; }
  bool at_name(std::string_view name) const {
    return peek().kind == TokenKind::Name && peek().text == name;
  }

  [[noreturn]] void fail(const Token& at, std::string message,
                         const char* code = codes::kSyntax) const {
    throw ParseFailure{{Severity::Error, code, std::move(message), at.location}};
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Newline: return "end of line";
      case TokenKind::Indent: return "indent";
      case TokenKind::Dedent: return "dedent";
      case TokenKind::End: return "end of procedure";
      case TokenKind::Comment: return "comment";
      default: return "'" + t.text + "'";
    }
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) fail(peek(), "expected '" + std::string(op) + "', found " + describe(peek()));
    advance();
  }

  // Skips the rest of a broken statement, including any block it opened.
  void synchronize() {
    while (peek().kind != TokenKind::Newline && peek().kind != TokenKind::End) advance();
    if (peek().kind == TokenKind::Newline) advance();
    if (peek().kind == TokenKind::Indent) skip_block();
  }

  void skip_block() {
    int depth = 0;
    do {
      if (peek().kind == TokenKind::Indent) ++depth;
      if (peek().kind == TokenKind::Dedent) --depth;
      if (peek().kind == TokenKind::End) return;
      advance();
    } while (depth > 0);
  }

  Block parse_block(bool top_level) {
    Block block;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::End) break;
      if (t.kind == TokenKind::Dedent) {
        if (!top_level) break;
        advance();
        continue;
      }
      if (t.kind == TokenKind::Newline) {
        advance();
        continue;
      }
      if (t.kind == TokenKind::Indent) {
        // The lexer already reported the bad indentation.
        skip_block();
        continue;
      }
      try {
        block.push_back(parse_statement());
      } catch (const ParseFailure& failure) {
        diagnostics_.push_back(failure.diagnostic);
        synchronize();
      }
    }
    return block;
  }

  std::optional<std::string> trailing_comment() {
    if (peek().kind == TokenKind::Comment) return advance().text;
    return std::nullopt;
  }

  void end_of_statement() {
    if (peek().kind == TokenKind::End) return;
    if (peek().kind != TokenKind::Newline) fail(peek(), "unexpected " + describe(peek()));
    advance();
  }

  // After the ':' of a block header. Returns the header's trailing comment.
  std::optional<std::string> suite(Block& body, const Token& header) {
    auto comment = trailing_comment();
    if (peek().kind != TokenKind::Newline) {
      fail(peek(), "expected end of line after ':', found " + describe(peek()));
    }
    advance();
    if (peek().kind != TokenKind::Indent) {
      fail(header, "expected an indented block after '" + header.text + "'", codes::kIndentation);
    }
    advance();
    body = parse_block(false);
    if (peek().kind == TokenKind::Dedent) advance();
    return comment;
  }

  static void prepend_comment(Block& body, std::optional<std::string> comment, int line) {
    if (comment) body.insert(body.begin(), Stmt(Comment{*comment}, line));
  }

  Stmt parse_statement() {
    const Token& t = peek();
    const int line = t.location.line;
    if (t.kind == TokenKind::Comment) {
      Comment c{advance().text};
      end_of_statement();
      return Stmt(std::move(c), line);
    }
    if (t.kind == TokenKind::Name) {
      if (t.text == "if") return parse_if();
      if (t.text == "while") {
        const Token& header = advance();
        Expr cond = parse_expr();
        expect_op(":");
        Block body;
        auto comment = suite(body, header);
        Stmt s(While{std::move(cond), std::move(body)}, line);
        s.trailing_comment = comment;
        return s;
      }
      if (t.text == "try") return parse_try();
      if (t.text == "elif" || t.text == "else" || t.text == "except") {
        fail(t, "'" + t.text + "' without a matching opening statement");
      }
    }
    if (t.kind == TokenKind::Op && t.text == ":") fail(t, "unexpected ':'");
    if (line_has_assignment()) return parse_assignment(line);
    Expr e = parse_expr();
    Stmt s(ExprStmt{std::move(e)}, line);
    s.trailing_comment = trailing_comment();
    end_of_statement();
    return s;
  }

  Stmt parse_if() {
    const int line = peek().location.line;
    If node;
    std::optional<std::string> head_comment;
    bool first = true;
    while (first || at_name("elif")) {
      const Token& header = advance();
      Expr cond = parse_expr();
      expect_op(":");
      Block body;
      auto comment = suite(body, header);
      if (first) {
        head_comment = comment;
      } else {
        prepend_comment(body, comment, header.location.line);
      }
      node.branches.push_back({std::move(cond), std::move(body)});
      first = false;
    }
    if (at_name("else")) {
      const Token& header = advance();
      expect_op(":");
      Block body;
      auto comment = suite(body, header);
      prepend_comment(body, comment, header.location.line);
      node.else_block = std::move(body);
    }
    Stmt s(std::move(node), line);
    s.trailing_comment = head_comment;
    return s;
  }

  Stmt parse_try() {
    const Token& header = advance();
    const int line = header.location.line;
    expect_op(":");
    TryExcept node;
    auto comment = suite(node.try_block, header);
    if (!at_name("except")) fail(peek(), "expected 'except' after 'try' block");
    const Token& except = advance();
    if (peek().kind == TokenKind::Name) node.exception = advance().text;
    expect_op(":");
    auto except_comment = suite(node.except_block, except);
    prepend_comment(node.except_block, except_comment, except.location.line);
    Stmt s(std::move(node), line);
    s.trailing_comment = comment;
    return s;
  }

  bool line_has_assignment() const {
    int depth = 0;
    for (std::size_t i = pos_; i < tokens_.size(); ++i) {
      const Token& t = tokens_[i];
      if (t.kind == TokenKind::Newline || t.kind == TokenKind::End) return false;
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[") ++depth;
      if (t.text == ")" || t.text == "]") --depth;
      if (t.text == "=" && depth == 0) return true;
    }
    return false;
  }

  std::string target_name() {
    const Token& t = peek();
    if (t.kind != TokenKind::Name || kKeywords.contains(t.text)) {
      fail(t, "assignment target must be an identifier, found " + describe(t));
    }
    return advance().text;
  }

  Stmt parse_assignment(int line) {
    Assign node{{}, false, Identifier{}};
    if (at_op("[")) {
      node.bracketed = true;
      advance();
      if (!at_op("]")) {
        node.targets.push_back(target_name());
        while (at_op(",")) {
          advance();
          if (at_op("]")) break;
          node.targets.push_back(target_name());
        }
      }
      expect_op("]");
      if (node.targets.empty()) fail(peek(), "empty assignment target list");
    } else {
      node.targets.push_back(target_name());
      while (at_op(",")) {
        advance();
        node.targets.push_back(target_name());
      }
    }
    expect_op("=");
    node.value = parse_expr();
    Stmt s(std::move(node), line);
    s.trailing_comment = trailing_comment();
    end_of_statement();
    return s;
  }

  Expr parse_expr() {
    Expr lhs = parse_and();
    while (at_name("or")) {
      advance();
      Expr rhs = parse_and();
      lhs = Or{std::move(lhs), std::move(rhs)};
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (at_name("and")) {
      advance();
      Expr rhs = parse_not();
      lhs = And{std::move(lhs), std::move(rhs)};
    }
    return lhs;
  }

  Expr parse_not() {
    if (at_name("not")) {
      advance();
      return Not{parse_not()};
    }
    return parse_comparison();
  }

  static std::optional<CompareOp> compare_op(const Token& t) {
    if (t.kind != TokenKind::Op) return std::nullopt;
    if (t.text == "==") return CompareOp::Eq;
    if (t.text == "!=") return CompareOp::Ne;
    if (t.text == ">") return CompareOp::Gt;
    if (t.text == "<") return CompareOp::Lt;
    if (t.text == ">=") return CompareOp::Ge;
    if (t.text == "<=") return CompareOp::Le;
    return std::nullopt;
  }

  Expr parse_comparison() {
    Expr lhs = parse_primary();
    if (auto op = compare_op(peek())) {
      advance();
      Expr rhs = parse_primary();
      if (compare_op(peek())) fail(peek(), "chained comparisons are not supported; use 'and'");
      return Compare{*op, std::move(lhs), std::move(rhs)};
    }
    return lhs;
  }

  std::vector<Expr> parse_items(std::string_view close) {
    std::vector<Expr> items;
    while (!at_op(close)) {
      items.push_back(parse_expr());
      if (at_op(",")) {
        advance();
        continue;
      }
      if (!at_op(close)) {
        fail(peek(), "expected ',' or '" + std::string(close) + "', found " + describe(peek()));
      }
    }
    advance();
    return items;
  }

  Expr parse_call(NodeNamespace ns, const Token& name_token) {
    NodeCall call;
    call.ns = ns;
    call.name = name_token.text;
    call.location = name_token.location;
    expect_op("(");
    call.args = parse_items(")");
    return call;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Name: {
        if (t.text == "True" || t.text == "False" || t.text == "true" || t.text == "false") {
          advance();
          return BoolLit{t.text == "True" || t.text == "true", t.text[0] == 'T' || t.text[0] == 'F'};
        }
        if (kKeywords.contains(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        const Token& name = advance();
        if (at_op(".")) {
          const Token& dot = advance();
          if (name.text != "API" && name.text != "ANSWER") {
            fail(dot, "attribute access is only allowed on API and ANSWER, not '" + name.text + "'");
          }
          if (peek().kind != TokenKind::Name) fail(peek(), "expected a node name after '.'");
          const Token& node = advance();
          if (!at_op("(")) fail(peek(), "expected '(' after " + name.text + "." + node.text);
          auto call = parse_call(name.text == "API" ? NodeNamespace::Api : NodeNamespace::Answer, node);
          std::get<NodeCall>(call.node).location = name.location;
          return call;
        }
        if (at_op("(")) return parse_call(NodeNamespace::Unqualified, name);
        return Identifier{name.text};
      }
      case TokenKind::Number:
        return NumberLit{advance().text};
      case TokenKind::String: {
        const Token& s = advance();
        return StringLit{s.text, s.quote};
      }
      case TokenKind::Ellipsis:
        advance();
        return EllipsisLit{};
      case TokenKind::Op:
        if (t.text == "-" && peek(1).kind == TokenKind::Number) {
          advance();
          return NumberLit{"-" + advance().text};
        }
        if (t.text == "[") {
          advance();
          return BracketList{parse_items("]")};
        }
        if (t.text == "(") {
          advance();
          Expr inner = parse_expr();
          if (at_op(",")) fail(peek(), "tuples are not supported; use [a, b]");
          expect_op(")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail(t, "expected an expression, found " + describe(t));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

ParseResult<ProcedureAst> parse_procedure(std::string_view source, int line_offset,
                                          int column_offset) {
  auto lexed = detail::lex_procedure(source, line_offset, column_offset);
  ProcedureParser parser(std::move(lexed.tokens));
  ProcedureAst ast{parser.parse_top()};

  ParseResult<ProcedureAst> result;
  result.diagnostics = std::move(lexed.diagnostics);
  for (auto& d : parser.diagnostics()) result.diagnostics.push_back(std::move(d));
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::pair(a.location.line, a.location.column) <
                            std::pair(b.location.line, b.location.column);
                   });
  if (ast.statements.empty() && !has_errors(result.diagnostics)) {
    result.diagnostics.push_back({Severity::Error, codes::kSyntax, "procedure is empty",
                                  {line_offset + 1, column_offset + 1}});
  }
  if (!has_errors(result.diagnostics)) result.value = std::move(ast);
  return result;
}

}  // namespace flowagent::pdl
