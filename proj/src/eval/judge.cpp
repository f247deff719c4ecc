#include "flowagent/eval/judge.hpp"

#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "flowagent/agent/prompt.hpp"

namespace flowagent::eval {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<int> score(const std::string& text, const char* label) {
  std::regex re(std::string(label) + R"(\s*Score\s*:\s*\**\s*(\d+))", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return std::stoi(m[1].str());
}

std::optional<bool> yes_no(const std::string& text, const char* label) {
  std::regex re(std::string(label) + R"(\s*:\s*\**\s*(Yes|No)\b)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return std::tolower(static_cast<unsigned char>(m[1].str()[0])) == 'y';
}

// Text between `start` and `end` markers of a rendered prompt.
std::string between(const std::string& text, const std::string& start, const std::string& end) {
  auto a = text.find(start);
  if (a == std::string::npos) return {};
  a += start.size();
  auto b = text.find(end, a);
  return text.substr(a, b == std::string::npos ? std::string::npos : b - a);
}

}  // namespace

std::string build_turn_judge_prompt(const std::string& workflow_info, const std::string& session,
                                    const std::string& reference, const std::string& predicted) {
  return agent::render_template(agent::prompts::turn_judge(), {{"workflow_info", workflow_info},
                                                               {"session", session},
                                                               {"reference_input", reference},
                                                               {"predicted_input", predicted}});
}

std::optional<TurnJudgement> parse_turn_judgement(std::string_view text) {
  const std::string s(text);
  auto consistent = yes_no(s, "Consistency");
  if (!consistent) return std::nullopt;
  return TurnJudgement{score(s, "Correctness"), score(s, "Helpfulness"), score(s, "Humanness"),
                       *consistent, true};
}

TurnJudgement judge_turn(const std::string& workflow_info, const std::string& prefix,
                         const std::string& reference_response, const std::string& predicted_response,
                         agent::LlmBackend& judge) {
  const auto prompt = build_turn_judge_prompt(workflow_info, prefix, reference_response, predicted_response);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (auto j = parse_turn_judgement(judge.complete_prompt(prompt))) return *j;
    } catch (const agent::BackendError& e) {
      spdlog::warn("turn judge backend error: {}", e.what());
    }
  }
  spdlog::warn("turn judge output unparseable twice; marking turn inconsistent");
  return TurnJudgement{};
}

std::shared_ptr<agent::LlmBackend> make_exact_match_judge() {
  return std::make_shared<agent::FunctionBackend>(
      [](const std::vector<agent::ChatMessage>& messages, const agent::CompletionParams&) {
        const std::string& prompt = messages.back().content;
        const auto reference = trim(between(prompt, "Here is the true value response from the reference: \n",
                                            "\n\nHere is the generated response from the assistant: "));
        const auto predicted = trim(between(prompt, "Here is the generated response from the assistant: \n",
                                            "\n\n\nPlease reply with the scores"));
        const bool same = reference == predicted;
        return std::string(same ? "Correctness Score: 10\nHelpfulness Score: 10\nHumanness Score: 10\n"
                                  "Consistency: Yes"
                                : "Correctness Score: 1\nHelpfulness Score: 1\nHumanness Score: 1\n"
                                  "Consistency: No");
      },
      "exact-match");
}

double task_progress(std::span<const agent::Action> transcript, std::span<const std::string> required,
                     std::vector<std::string>* completed, std::vector<std::string>* warnings) {
  if (required.empty()) {
    if (warnings) warnings->push_back("no required nodes; task progress defined as 1.0");
    return 1.0;
  }
  std::set<std::string> executed;
  for (const auto& a : transcript) {
    if (const auto* r = std::get_if<agent::ToolResult>(&a); r && r->ok) executed.insert(r->name);
  }
  std::set<std::string> wanted(required.begin(), required.end());
  int done = 0;
  for (const auto& node : wanted) {
    if (!executed.contains(node)) continue;
    ++done;
    if (completed) completed->push_back(node);
  }
  return static_cast<double>(done) / static_cast<double>(wanted.size());
}

std::string build_session_judge_prompt(const std::string& workflow_info, const std::string& user_needs,
                                       const std::string& session) {
  return agent::render_template(agent::prompts::session_judge(),
                                {{"workflow_info", workflow_info}, {"user_needs", user_needs}, {"session", session}});
}

std::optional<bool> parse_session_success(std::string_view text) { return yes_no(std::string(text), "Success"); }

SessionJudgement judge_session(const std::string& workflow_info, std::span<const agent::Action> transcript,
                               std::span<const std::string> required_nodes, const std::string& user_needs,
                               agent::LlmBackend* judge) {
  SessionJudgement out;
  out.task_progress = task_progress(transcript, required_nodes, &out.completed, &out.warnings);
  if (!judge) {
    out.success = out.task_progress == 1.0;
    return out;
  }
  const auto prompt = build_session_judge_prompt(workflow_info, user_needs, agent::render_transcript(transcript));
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (auto verdict = parse_session_success(judge->complete_prompt(prompt))) {
        out.success = *verdict;
        return out;
      }
    } catch (const agent::BackendError& e) {
      spdlog::warn("session judge backend error: {}", e.what());
    }
  }
  out.warnings.push_back("session judge output unparseable; success recorded as false");
  return out;
}

}  // namespace flowagent::eval
