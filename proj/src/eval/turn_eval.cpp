#include "flowagent/eval/turn_eval.hpp"

#include <cctype>
#include <cstdlib>

#include "flowagent/agent/pyrepr.hpp"
#include "flowagent/pdl/render.hpp"

namespace flowagent::eval {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string slot_text(const agent::Json& v) {
  if (v.is_string()) return trim(v.get<std::string>());
  return v.dump();
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return d;
}

long triple_count(const agent::Json& args) { return args.empty() ? 1 : static_cast<long>(args.size()); }

}  // namespace

std::optional<double> ToolCounts::precision() const {
  if (predicted == 0 && reference == 0) return std::nullopt;
  return predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
}

std::optional<double> ToolCounts::recall() const {
  if (predicted == 0 && reference == 0) return std::nullopt;
  return reference == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(reference);
}

std::optional<double> ToolCounts::f1() const {
  auto p = precision();
  auto r = recall();
  if (!p || !r) return std::nullopt;
  if (*p + *r == 0.0) return 0.0;
  return 2.0 * *p * *r / (*p + *r);
}

bool slot_values_equal(const agent::Json& a, const agent::Json& b) {
  const auto sa = slot_text(a);
  const auto sb = slot_text(b);
  if (auto na = as_number(sa)) {
    if (auto nb = as_number(sb)) return *na == *nb;
  }
  return sa == sb;
}

ToolCounts score_tool_call(const agent::ToolCall* predicted, const ReferenceToolCall* reference) {
  ToolCounts c;
  if (predicted) c.predicted = triple_count(predicted->args);
  if (reference) c.reference = triple_count(reference->args);
  if (!predicted || !reference || predicted->name != reference->name) return c;
  if (reference->args.empty()) {
    c.matched = predicted->args.empty() ? 1 : 0;
    return c;
  }
  for (const auto& [slot, value] : reference->args.items()) {
    auto it = predicted->args.find(slot);
    if (it != predicted->args.end() && slot_values_equal(*it, value)) ++c.matched;
  }
  return c;
}

std::vector<TurnRecord> evaluate_turns(const ReferenceSession& reference,
                                       std::shared_ptr<const agent::Workflow> workflow,
                                       const agent::Agent& agent, const agent::ToolRegistry& registry,
                                       agent::LlmBackend& judge, const TurnEvalConfig& cfg) {
  const std::string workflow_info =
      cfg.workflow_info.empty() ? pdl::render_for_prompt(workflow->doc) : cfg.workflow_info;
  std::vector<TurnRecord> out;
  bool oow = false;
  for (std::size_t t = 0; t < reference.turns.size(); ++t) {
    const auto& turn = reference.turns[t];
    if (turn.role == Role::User) oow = turn.oow.has_value();
    if (turn.role != Role::Bot) continue;

    ReferenceSession prefix{reference.session_id,
                            {reference.turns.begin(), reference.turns.begin() + static_cast<std::ptrdiff_t>(t)}};
    const auto actions = to_actions(prefix);
    const auto state = agent::replay(reference.session_id, workflow, actions);
    const auto decision = agent::decide_once(state, agent, registry);

    TurnRecord rec;
    rec.session_id = reference.session_id;
    rec.turn_index = t;
    rec.oow = oow;
    rec.tool_turn = turn.tool_call.has_value();
    rec.fallback = decision.fallback;
    rec.reference = std::string("BOT: ") + turn.text;
    rec.predicted = agent::transcript_line(decision.action).value_or("");

    const auto* call = std::get_if<agent::ToolCall>(&decision.action);
    rec.tool = score_tool_call(call, turn.tool_call ? &*turn.tool_call : nullptr);
    if (rec.tool_turn) {
      rec.consistent = call && rec.tool.matched == rec.tool.reference && rec.tool.predicted == rec.tool.reference;
    } else if (const auto* response = std::get_if<agent::BotResponse>(&decision.action)) {
      rec.judgement = judge_turn(workflow_info, agent::render_transcript(actions), turn.text, response->text, judge);
      rec.consistent = rec.judgement->consistent;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace flowagent::eval
