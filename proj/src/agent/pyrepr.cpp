#include "flowagent/agent/pyrepr.hpp"

#include <cctype>

namespace flowagent::agent {

using Json = nlohmann::ordered_json;

namespace {

std::string repr_string(const std::string& s) {
  const bool has_single = s.find('\'') != std::string::npos;
  const bool has_double = s.find('"') != std::string::npos;
  const char quote = has_single && !has_double ? '"' : '\'';
  std::string out(1, quote);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c == quote) out += '\\';
        out += c;
    }
  }
  out += quote;
  return out;
}

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view text) : text_(text) {}

  Json parse() {
    Json value = parse_value();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("python literal: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Json parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '{') return parse_dict();
    if (c == '[') return parse_sequence('[', ']');
    if (c == '(') return parse_sequence('(', ')');
    if (c == '\'' || c == '"') return parse_string();
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      auto word = text_.substr(start, pos_ - start);
      if (word == "True") return true;
      if (word == "False") return false;
      if (word == "None") return nullptr;
      pos_ = start;
      fail("unknown name '" + std::string(word) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Json parse_dict() {
    ++pos_;
    Json out = Json::object();
    if (consume('}')) return out;
    while (true) {
      Json key = parse_value();
      if (!key.is_string()) fail("dict keys must be strings");
      if (!consume(':')) fail("expected ':'");
      out[key.get<std::string>()] = parse_value();
      if (consume('}')) return out;
      if (!consume(',')) fail("expected ',' or '}'");
      if (consume('}')) return out;
    }
  }

  Json parse_sequence(char open, char close) {
    ++pos_;
    Json out = Json::array();
    if (consume(close)) return out;
    while (true) {
      out.push_back(parse_value());
      if (consume(close)) return out;
      if (!consume(',')) fail(std::string("expected ',' or '") + close + "'");
      if (consume(close)) return out;
    }
  }

  Json parse_string() {
    const char quote = text_[pos_++];
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == quote) return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) break;
      char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        default: out += e;
      }
    }
    fail("unterminated string");
  }

  Json parse_number() {
    std::size_t start = pos_;
    if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
    bool is_float = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E' ||
                 ((c == '-' || c == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))) {
        is_float = true;
        ++pos_;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      if (is_float) {
        double d = std::stod(token, &used);
        if (used == token.size()) return d;
      } else {
        long long v = std::stoll(token, &used);
        if (used == token.size()) return v;
      }
    } catch (const std::exception&) {
    }
    pos_ = start;
    fail("malformed number '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_pyrepr(const Json& value) {
  switch (value.type()) {
    case Json::value_t::object: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, v] : value.items()) {
        if (!first) out += ", ";
        first = false;
        out += repr_string(k) + ": " + to_pyrepr(v);
      }
      return out + "}";
    }
    case Json::value_t::array: {
      std::string out = "[";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out += ", ";
        out += to_pyrepr(value[i]);
      }
      return out + "]";
    }
    case Json::value_t::string: return repr_string(value.get<std::string>());
    case Json::value_t::boolean: return value.get<bool>() ? "True" : "False";
    case Json::value_t::null: return "None";
    default: return value.dump();
  }
}

Json parse_pyliteral(std::string_view text) { return LiteralParser(text).parse(); }

}  // namespace flowagent::agent
