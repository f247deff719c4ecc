#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowagent/pdl/diagnostic.hpp"

namespace flowagent::pdl::detail {

enum class TokenKind { Name, Number, String, Op, Ellipsis, Comment, Newline, Indent, Dedent, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // string literals: unescaped value; comments: text after '#'
  char quote = 0;
  SourceLocation location;
  bool line_start = false;  // first token of a logical line (comments only)
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
};

// Python-style tokenizer: INDENT/DEDENT from leading spaces, implicit line
// joining inside brackets, `#` comments kept as tokens.
LexResult lex_procedure(std::string_view source, int line_offset, int column_offset);

}  // namespace flowagent::pdl::detail
