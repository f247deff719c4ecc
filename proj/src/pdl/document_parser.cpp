#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <json.hpp>

#include "flowagent/pdl/document.hpp"
#include "flowagent/pdl/parser.hpp"

namespace flowagent::pdl {

const char* to_string(NodeKind kind) { return kind == NodeKind::Api ? "API" : "ANSWER"; }

const NodeDef* PdlDocument::find_api(std::string_view node_name) const {
  for (const auto& n : api_nodes) {
    if (n.name == node_name) return &n;
  }
  return nullptr;
}

const NodeDef* PdlDocument::find_answer(std::string_view node_name) const {
  for (const auto& n : answer_nodes) {
    if (n.name == node_name) return &n;
  }
  return nullptr;
}

const NodeDef* PdlDocument::find_node(std::string_view node_name) const {
  if (const auto* n = find_api(node_name)) return n;
  return find_answer(node_name);
}

std::vector<const NodeDef*> PdlDocument::all_nodes() const {
  std::vector<const NodeDef*> out;
  out.reserve(api_nodes.size() + answer_nodes.size());
  for (const auto& n : api_nodes) out.push_back(&n);
  for (const auto& n : answer_nodes) out.push_back(&n);
  return out;
}

std::vector<TemplatePlaceholder> template_placeholders(std::string_view text) {
  static const std::regex kPlaceholder(R"(\$([A-Za-z_][A-Za-z0-9_]*)(?:-([A-Za-z_][A-Za-z0-9_]*))?)");
  std::vector<TemplatePlaceholder> out;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPlaceholder); it != std::sregex_iterator();
       ++it) {
    const auto& m = *it;
    TemplatePlaceholder p;
    if (m[2].matched) {
      p.node = m[1].str();
      p.slot = m[2].str();
    } else {
      p.slot = m[1].str();
    }
    p.offset = static_cast<std::size_t>(m.position(0));
    p.length = static_cast<std::size_t>(m.length(0));
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string unquote(std::string_view value) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    try {
      return nlohmann::json::parse(value).get<std::string>();
    } catch (const nlohmann::json::exception&) {
      return std::string(value);
    }
  }
  if (value.size() >= 2 && value.front() == '\'' && value.back() == '\'') {
    std::string out;
    auto inner = value.substr(1, value.size() - 2);
    for (std::size_t i = 0; i < inner.size(); ++i) {
      out += inner[i];
      if (inner[i] == '\'' && i + 1 < inner.size() && inner[i + 1] == '\'') ++i;
    }
    return out;
  }
  return std::string(value);
}

enum class Section { None, Apis, Answers };

const std::set<std::string> kTopKeys = {"name",    "desc",    "detailed_desc", "desc_detail",
                                        "apis",    "answers", "procedure"};
const std::set<std::string> kNodeFields = {"name",         "desc",         "request", "response",
                                           "precondition", "preconditions", "pre"};

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t value_column = 0;  // 0-based, within the trimmed line
};

std::optional<KeyValue> split_key(std::string_view trimmed) {
  std::size_t i = 0;
  if (trimmed.empty() || !(std::isalpha(static_cast<unsigned char>(trimmed[0])) || trimmed[0] == '_')) {
    return std::nullopt;
  }
  while (i < trimmed.size() && (std::isalnum(static_cast<unsigned char>(trimmed[i])) || trimmed[i] == '_')) {
    ++i;
  }
  if (i >= trimmed.size() || trimmed[i] != ':') return std::nullopt;
  if (i + 1 < trimmed.size() && trimmed[i + 1] != ' ') return std::nullopt;
  KeyValue kv;
  kv.key = std::string(trimmed.substr(0, i));
  auto rest = trimmed.substr(i + 1);
  std::size_t lead = 0;
  while (lead < rest.size() && rest[lead] == ' ') ++lead;
  kv.value = std::string(trim(rest));
  kv.value_column = i + 1 + lead;
  return kv;
}

class DocumentParser {
 public:
  explicit DocumentParser(std::string_view source) {
    std::size_t start = 0;
    while (start <= source.size()) {
      auto end = source.find('\n', start);
      auto line = source.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.emplace_back(line);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }

  ParseResult<PdlDocument> run() {
    for (line_index_ = 0; line_index_ < lines_.size(); ++line_index_) parse_line();
    finish();
    ParseResult<PdlDocument> result;
    result.diagnostics = std::move(diagnostics_);
    if (!has_errors(result.diagnostics)) result.value = std::move(doc_);
    return result;
  }

 private:
  int line_no() const { return static_cast<int>(line_index_) + 1; }

  void report(Severity severity, const char* code, std::string message, int column) {
    diagnostics_.push_back({severity, code, std::move(message), {line_no(), column}});
  }
  void error(std::string message, int column, const char* code = codes::kSyntax) {
    report(Severity::Error, code, std::move(message), column);
  }

  NodeDef* current() {
    if (!current_kind_) return nullptr;
    auto& list = *current_kind_ == NodeKind::Api ? doc_.api_nodes : doc_.answer_nodes;
    return list.empty() ? nullptr : &list.back();
  }

  void close_node() {
    current_kind_.reset();
    pending_list_ = nullptr;
    continuation_ = nullptr;
  }

  void parse_line() {
    const std::string& line = lines_[line_index_];
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent < line.size() && line[indent] == '\t') {
      error("tab character in indentation; use spaces", static_cast<int>(indent) + 1,
            codes::kIndentation);
      return;
    }
    const std::string_view trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#' || trimmed == "---") {
      continuation_ = nullptr;
      return;
    }
    const int column = static_cast<int>(indent) + 1;
    if (trimmed == "...") {
      report(Severity::Warning, codes::kElision, "elided content marker '...' ignored", column);
      return;
    }

    if (trimmed.front() == '-' && (trimmed.size() == 1 || trimmed[1] == ' ')) {
      auto rest = trim(trimmed.substr(1));
      const int rest_column = column + static_cast<int>(trimmed.size() - rest.size());
      if (pending_list_ && !split_key(rest)) {
        add_list_item(*pending_list_, rest, rest_column);
        return;
      }
      if (section_ == Section::None) {
        error("list item outside of an APIs or ANSWERs section", column);
        return;
      }
      start_node(indent);
      if (rest.empty()) return;
      auto kv = split_key(rest);
      if (!kv) {
        error("expected 'name: <identifier>' in node definition", rest_column);
        return;
      }
      set_node_field(*kv, rest_column, rest_column + static_cast<int>(kv->value_column));
      return;
    }

    auto kv = split_key(trimmed);
    if (!kv) {
      if (continuation_ && indent > continuation_indent_) {
        *continuation_ += ' ';
        *continuation_ += trimmed;
        return;
      }
      error("expected 'key: value', found '" + std::string(trimmed) + "'", column);
      return;
    }
    const int value_column = column + static_cast<int>(kv->value_column);
    const std::string key = lower(kv->key);
    if (current() && indent > node_indent_ && kNodeFields.contains(key)) {
      set_node_field(*kv, column, value_column);
      return;
    }
    if (kTopKeys.contains(key)) {
      close_node();
      set_top_level(key, *kv, indent, column, value_column);
      return;
    }
    if (current() && indent > node_indent_) {
      report(Severity::Warning, codes::kUnknownField, "unknown node field '" + kv->key + "' ignored",
             column);
      pending_list_ = nullptr;
      continuation_ = nullptr;
      return;
    }
    error("unknown top-level key '" + kv->key + "'", column);
  }

  void start_node(std::size_t indent) {
    close_node();
    current_kind_ = section_ == Section::Apis ? NodeKind::Api : NodeKind::Answer;
    auto& list = *current_kind_ == NodeKind::Api ? doc_.api_nodes : doc_.answer_nodes;
    NodeDef node;
    node.kind = *current_kind_;
    node.location = {line_no(), static_cast<int>(indent) + 1};
    list.push_back(std::move(node));
    node_indent_ = indent;
    node_fields_.clear();
  }

  void set_node_field(const KeyValue& kv, int key_column, int value_column) {
    NodeDef* node = current();
    std::string key = lower(kv.key);
    if (key == "pre" || key == "preconditions") key = "precondition";
    pending_list_ = nullptr;
    continuation_ = nullptr;
    if (!node_fields_.insert(key).second) {
      error("duplicate field '" + kv.key + "' in node definition", key_column);
      return;
    }
    if (key == "name") {
      std::string name = unquote(kv.value);
      if (!is_identifier(name)) {
        error("node name must be an identifier, found '" + kv.value + "'", value_column);
        return;
      }
      node->name = std::move(name);
      return;
    }
    if (key == "desc") {
      node->desc = unquote(kv.value);
      continuation_ = &*node->desc;
      continuation_indent_ = static_cast<std::size_t>(key_column - 1);
      return;
    }
    std::vector<std::string>& target = key == "request"    ? node->request_slots
                                       : key == "response" ? node->response_slots
                                                           : node->preconditions;
    if (kv.value.empty()) {
      pending_list_ = &target;
      return;
    }
    parse_flow_list(kv.value, value_column, target);
  }

  void parse_flow_list(std::string_view value, int column, std::vector<std::string>& out) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
      error("expected a list such as [a, b], found '" + std::string(value) + "'", column);
      return;
    }
    auto inner = value.substr(1, value.size() - 2);
    if (trim(inner).empty()) return;
    std::size_t start = 0;
    char quote = 0;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
      if (i < inner.size()) {
        char c = inner[i];
        if (quote) {
          if (c == quote) quote = 0;
          continue;
        }
        if (c == '\'' || c == '"') {
          quote = c;
          continue;
        }
        if (c != ',') continue;
      }
      auto raw = inner.substr(start, i - start);
      auto item = trim(raw);
      const int item_column = column + 1 + static_cast<int>(start + (raw.size() - trim(raw).size() > 0 ? raw.find_first_not_of(' ') : 0));
      if (!item.empty() || i < inner.size()) add_list_item(out, item, item_column);
      start = i + 1;
    }
  }

  void add_list_item(std::vector<std::string>& out, std::string_view raw, int column) {
    std::string item = unquote(trim(raw));
    if (!is_identifier(item)) {
      error("list items must be identifiers, found '" + std::string(raw) + "'", column);
      return;
    }
    out.push_back(std::move(item));
  }

  void set_top_level(const std::string& key, const KeyValue& kv, std::size_t indent, int column,
                     int value_column) {
    if (!seen_top_.insert(key == "desc_detail" ? "detailed_desc" : key).second) {
      error("duplicate top-level key '" + kv.key + "'", column);
      return;
    }
    if (key == "name" || key == "desc" || key == "detailed_desc" || key == "desc_detail") {
      section_ = Section::None;
      std::string* field = key == "name" ? &doc_.name : key == "desc" ? &doc_.desc : nullptr;
      if (!field) {
        doc_.detailed_desc = std::string();
        field = &*doc_.detailed_desc;
      }
      *field = unquote(kv.value);
      continuation_ = field;
      continuation_indent_ = indent;
      return;
    }
    if (key == "apis" || key == "answers") {
      section_ = key == "apis" ? Section::Apis : Section::Answers;
      if (!kv.value.empty() && kv.value != "[]") {
        error("expected a list of node definitions under '" + kv.key + "'", value_column);
      }
      return;
    }
    section_ = Section::None;
    parse_procedure_block(kv, indent, value_column);
  }

  void parse_procedure_block(const KeyValue& kv, std::size_t key_indent, int value_column) {
    have_procedure_ = true;
    if (!kv.value.empty() && kv.value.front() != '|') {
      doc_.procedure_source = kv.value + "\n";
      doc_.procedure_first_line = line_no();
      attach_procedure(line_no() - 1, value_column - 1);
      return;
    }
    if (kv.value != "|" && kv.value != "|-" && kv.value != "|+") {
      error("unsupported block scalar indicator '" + kv.value + "'; use '|'", value_column);
    }
    std::size_t first = line_index_ + 1;
    while (first < lines_.size() && trim(lines_[first]).empty()) ++first;
    if (first >= lines_.size()) {
      error("procedure block is empty", value_column, codes::kMissingProcedure);
      return;
    }
    std::size_t block_indent = 0;
    while (block_indent < lines_[first].size() && lines_[first][block_indent] == ' ') ++block_indent;
    if (block_indent <= key_indent && key_indent > 0) {
      line_index_ = first;
      error("procedure lines must be indented under 'Procedure:'", 1, codes::kIndentation);
      return;
    }
    std::vector<std::string> content;
    std::size_t i = first;
    for (; i < lines_.size(); ++i) {
      const std::string& l = lines_[i];
      if (trim(l).empty()) {
        content.emplace_back();
        continue;
      }
      std::size_t lead = 0;
      while (lead < l.size() && l[lead] == ' ') ++lead;
      if (lead < block_indent) break;
      content.push_back(l.substr(block_indent));
    }
    while (!content.empty() && content.back().empty()) content.pop_back();
    std::string source;
    for (const auto& l : content) {
      source += l;
      source += '\n';
    }
    doc_.procedure_source = std::move(source);
    doc_.procedure_first_line = static_cast<int>(first) + 1;
    attach_procedure(static_cast<int>(first), static_cast<int>(block_indent));
    line_index_ = first + content.size() - 1;
  }

  void attach_procedure(int line_offset, int column_offset) {
    auto parsed = parse_procedure(doc_.procedure_source, line_offset, column_offset);
    for (auto& d : parsed.diagnostics) diagnostics_.push_back(std::move(d));
    if (parsed.value) doc_.procedure_ast = std::move(*parsed.value);
  }

  void finish() {
    line_index_ = lines_.empty() ? 0 : lines_.size() - 1;
    if (doc_.name.empty()) {
      diagnostics_.push_back({Severity::Error, codes::kMissingName, "document has no 'Name'", {1, 1}});
    }
    if (!have_procedure_) {
      diagnostics_.push_back({Severity::Error, codes::kMissingProcedure,
                              "document has no 'Procedure' block", {line_no(), 1}});
    }
    for (const auto* list : {&doc_.api_nodes, &doc_.answer_nodes}) {
      for (const auto& node : *list) {
        if (node.name.empty()) {
          diagnostics_.push_back({Severity::Error, codes::kSyntax, "node definition has no 'name'",
                                  node.location});
        }
      }
    }
    for (const auto& node : doc_.answer_nodes) {
      if (!node.response_slots.empty()) {
        diagnostics_.push_back({Severity::Error, codes::kAnswerResponseSlots,
                                "ANSWER node '" + node.name + "' cannot declare response slots",
                                node.location});
      }
    }
  }

  std::vector<std::string> lines_;
  std::size_t line_index_ = 0;
  PdlDocument doc_;
  std::vector<Diagnostic> diagnostics_;
  Section section_ = Section::None;
  std::optional<NodeKind> current_kind_;
  std::size_t node_indent_ = 0;
  std::set<std::string> node_fields_;
  std::set<std::string> seen_top_;
  std::vector<std::string>* pending_list_ = nullptr;
  std::string* continuation_ = nullptr;
  std::size_t continuation_indent_ = 0;
  bool have_procedure_ = false;
};

}  // namespace

ParseResult<PdlDocument> parse_pdl(std::string_view source) { return DocumentParser(source).run(); }

}  // namespace flowagent::pdl
