#pragma once

#include <memory>
#include <optional>
#include <string>

#include "flowagent/agent/backend.hpp"
#include "flowagent/pdl/document.hpp"

namespace flowagent::agent {

class AnswerClassifier {
 public:
  virtual ~AnswerClassifier() = default;
  virtual std::optional<std::string> classify(const std::string& response_text,
                                              const pdl::PdlDocument& doc) const = 0;
};

// Scores each ANSWER template by the share of its literal words (placeholders
// removed, counted with multiplicity) that appear in the response. The unique
// best score at or above the threshold wins.
class TemplateOverlapClassifier : public AnswerClassifier {
 public:
  explicit TemplateOverlapClassifier(double threshold = 0.6) : threshold_(threshold) {}
  std::optional<std::string> classify(const std::string& response_text,
                                      const pdl::PdlDocument& doc) const override;
  double score(const std::string& response_text, const std::string& template_text) const;

 private:
  double threshold_;
};

// Asks a backend to name the ANSWER node ("Answer: <name>" or "Answer: none").
class LlmAnswerClassifier : public AnswerClassifier {
 public:
  explicit LlmAnswerClassifier(std::shared_ptr<LlmBackend> backend) : backend_(std::move(backend)) {}
  std::optional<std::string> classify(const std::string& response_text,
                                      const pdl::PdlDocument& doc) const override;

 private:
  std::shared_ptr<LlmBackend> backend_;
};

// Explicit label first, then the classifier (when given). An explicit label is
// passed through unchanged even if undeclared; the dependency controller
// rejects unknown nodes.
std::optional<std::string> label_answer_node(const std::string& response_text,
                                             const std::optional<std::string>& explicit_label,
                                             const pdl::PdlDocument& doc,
                                             const AnswerClassifier* classifier);

}  // namespace flowagent::agent
