#include "procedure_lexer.hpp"

#include <cctype>

namespace flowagent::pdl::detail {

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_lines(std::string_view source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= source.size()) {
    auto end = source.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < source.size()) lines.push_back(source.substr(start));
      break;
    }
    auto line = source.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

class Lexer {
 public:
  Lexer(int line_offset, int column_offset) : line_offset_(line_offset), column_offset_(column_offset) {}

  LexResult run(std::string_view source) {
    auto lines = split_lines(source);
    for (std::size_t i = 0; i < lines.size(); ++i) lex_line(lines[i], static_cast<int>(i) + 1);
    if (depth_ > 0) {
      error(codes::kSyntax, "unclosed bracket at end of procedure", bracket_open_);
      emit(TokenKind::Newline, "", last_location_);
    }
    SourceLocation end_loc{line_offset_ + static_cast<int>(lines.size()) + 1, 1};
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", end_loc);
    }
    emit(TokenKind::End, "", end_loc);
    return std::move(result_);
  }

 private:
  SourceLocation loc(int line, std::size_t col) const {
    return {line_offset_ + line, column_offset_ + static_cast<int>(col) + 1};
  }

  void emit(TokenKind kind, std::string text, SourceLocation location, char quote = 0) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.quote = quote;
    t.location = location;
    result_.tokens.push_back(std::move(t));
    last_location_ = location;
  }

  void error(const char* code, std::string message, SourceLocation location) {
    result_.diagnostics.push_back({Severity::Error, code, std::move(message), location});
  }

  // Returns false when the line must be skipped.
  bool handle_indentation(std::size_t indent, bool comment_only, int line) {
    const auto here = loc(line, indent);
    if (comment_only) {
      if (indent > indents_.back() && after_header_) {
        indents_.push_back(indent);
        emit(TokenKind::Indent, "", here);
        after_header_ = false;
        return true;
      }
      // A comment belongs to the innermost open block whose indentation
      // does not exceed its own.
      while (indents_.size() > 1 && indents_.back() > indent) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", here);
      }
      return true;
    }
    if (indent > indents_.back()) {
      if (!after_header_) {
        error(codes::kIndentation, "unexpected indent", here);
        return false;
      }
      indents_.push_back(indent);
      emit(TokenKind::Indent, "", here);
      return true;
    }
    if (after_header_) {
      error(codes::kIndentation, "expected an indented block", here);
    }
    while (indent < indents_.back()) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", here);
    }
    if (indent != indents_.back()) {
      error(codes::kIndentation, "unindent does not match any outer indentation level", here);
      indents_.push_back(indent);
    }
    return true;
  }

  void lex_line(std::string_view text, int line) {
    std::size_t pos = 0;
    if (depth_ == 0) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
        if (text[pos] == '\t') {
          error(codes::kIndentation, "tab character in indentation; use spaces", loc(line, pos));
          return;
        }
        ++pos;
      }
      if (pos == text.size()) return;  // blank
      const bool comment_only = text[pos] == '#';
      if (!handle_indentation(pos, comment_only, line)) return;
      if (comment_only) {
        emit(TokenKind::Comment, rstrip(text.substr(pos + 1)), loc(line, pos));
        result_.tokens.back().line_start = true;
        emit(TokenKind::Newline, "", loc(line, text.size()));
        // A leading comment does not consume the pending block header.
        return;
      }
      after_header_ = false;
    }

    bool last_was_colon = false;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ' ' || c == '\t') {
        ++pos;
        continue;
      }
      const auto here = loc(line, pos);
      if (c == '#') {
        emit(TokenKind::Comment, rstrip(text.substr(pos + 1)), here);
        pos = text.size();
        break;
      }
      last_was_colon = false;
      if (is_name_start(c)) {
        std::size_t start = pos;
        while (pos < text.size() && is_name_char(text[pos])) ++pos;
        emit(TokenKind::Name, std::string(text.substr(start, pos - start)), here);
        continue;
      }
      if (is_digit(c)) {
        std::size_t start = pos;
        while (pos < text.size() && is_digit(text[pos])) ++pos;
        if (pos + 1 < text.size() && text[pos] == '.' && is_digit(text[pos + 1])) {
          ++pos;
          while (pos < text.size() && is_digit(text[pos])) ++pos;
        }
        emit(TokenKind::Number, std::string(text.substr(start, pos - start)), here);
        continue;
      }
      if (c == '"' || c == '\'') {
        std::string value;
        ++pos;
        bool closed = false;
        while (pos < text.size()) {
          char d = text[pos++];
          if (d == '\\' && pos < text.size()) {
            char e = text[pos++];
            switch (e) {
              case 'n': value += '\n'; break;
              case 't': value += '\t'; break;
              default: value += e;
            }
            continue;
          }
          if (d == c) {
            closed = true;
            break;
          }
          value += d;
        }
        if (!closed) {
          error(codes::kSyntax, "unterminated string literal", here);
          return;
        }
        emit(TokenKind::String, std::move(value), here, c);
        continue;
      }
      if (text.substr(pos, 3) == "...") {
        emit(TokenKind::Ellipsis, "...", here);
        pos += 3;
        continue;
      }
      auto two = text.substr(pos, 2);
      if (two == "==" || two == "!=" || two == ">=" || two == "<=") {
        emit(TokenKind::Op, std::string(two), here);
        pos += 2;
        continue;
      }
      switch (c) {
        case '(':
        case '[':
          if (depth_++ == 0) bracket_open_ = here;
          break;
        case ')':
        case ']':
          if (depth_ == 0) {
            error(codes::kSyntax, std::string("unmatched '") + c + "'", here);
            return;
          }
          --depth_;
          break;
        case '>': case '<': case '=': case ',': case ':': case '.': case '-':
          break;
        default:
          error(codes::kSyntax, std::string("unexpected character '") + c + "'", here);
          // Drop the rest of the logical line.
          if (depth_ == 0) emit(TokenKind::Newline, "", loc(line, text.size()));
          return;
      }
      emit(TokenKind::Op, std::string(1, c), here);
      last_was_colon = c == ':';
      ++pos;
    }
    if (depth_ == 0) {
      emit(TokenKind::Newline, "", loc(line, text.size()));
      after_header_ = last_was_colon;
    }
  }

  static std::string rstrip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  int line_offset_;
  int column_offset_;
  std::vector<std::size_t> indents_{0};
  int depth_ = 0;
  bool after_header_ = false;
  SourceLocation bracket_open_;
  SourceLocation last_location_;
  LexResult result_;
};

}  // namespace

LexResult lex_procedure(std::string_view source, int line_offset, int column_offset) {
  return Lexer(line_offset, column_offset).run(source);
}

}  // namespace flowagent::pdl::detail
