#include "flowagent/agent/labeler.hpp"

#include <cctype>
#include <map>

#include "flowagent/agent/prompt.hpp"
#include "flowagent/pdl/document.hpp"

namespace flowagent::agent {

namespace {

std::map<std::string, int> word_counts(const std::string& text) {
  std::map<std::string, int> out;
  std::string word;
  for (char c : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!word.empty()) {
      ++out[word];
      word.clear();
    }
  }
  return out;
}

std::string strip_placeholders(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& p : pdl::template_placeholders(text)) {
    out += text.substr(pos, p.offset - pos);
    out += ' ';
    pos = p.offset + p.length;
  }
  return out + text.substr(pos);
}

}  // namespace

double TemplateOverlapClassifier::score(const std::string& response_text,
                                        const std::string& template_text) const {
  const auto tmpl = word_counts(strip_placeholders(template_text));
  const auto resp = word_counts(response_text);
  int total = 0;
  int hit = 0;
  for (const auto& [word, n] : tmpl) {
    total += n;
    if (auto it = resp.find(word); it != resp.end()) hit += std::min(n, it->second);
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

std::optional<std::string> TemplateOverlapClassifier::classify(const std::string& response_text,
                                                               const pdl::PdlDocument& doc) const {
  std::optional<std::string> best;
  double best_score = -1.0;
  bool tie = false;
  for (const auto& node : doc.answer_nodes) {
    if (!node.desc || node.desc->empty()) continue;
    double s = score(response_text, *node.desc);
    if (s > best_score) {
      best = node.name;
      best_score = s;
      tie = false;
    } else if (s == best_score) {
      tie = true;
    }
  }
  if (!best || tie || best_score < threshold_) return std::nullopt;
  return best;
}

std::optional<std::string> LlmAnswerClassifier::classify(const std::string& response_text,
                                                         const pdl::PdlDocument& doc) const {
  std::string answers;
  for (const auto& node : doc.answer_nodes) {
    if (!answers.empty()) answers += '\n';
    answers += node.name + ": " + node.desc.value_or("");
  }
  std::string reply;
  try {
    reply = backend_->complete_prompt(
        render_template(prompts::answer_classifier(), {{"answers", answers}, {"response", response_text}}));
  } catch (const BackendError&) {
    return std::nullopt;
  }
  auto pos = reply.rfind("Answer:");
  if (pos == std::string::npos) return std::nullopt;
  std::string name;
  for (std::size_t i = pos + 7; i < reply.size(); ++i) {
    char c = reply[i];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      name += c;
    } else if (!name.empty()) {
      break;
    }
  }
  if (name.empty() || name == "none" || !doc.find_answer(name)) return std::nullopt;
  return name;
}

std::optional<std::string> label_answer_node(const std::string& response_text,
                                             const std::optional<std::string>& explicit_label,
                                             const pdl::PdlDocument& doc,
                                             const AnswerClassifier* classifier) {
  if (explicit_label) return explicit_label;
  if (!classifier) return std::nullopt;
  return classifier->classify(response_text, doc);
}

}  // namespace flowagent::agent
