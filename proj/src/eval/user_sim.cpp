#include "flowagent/eval/user_sim.hpp"

#include <cctype>

#include "flowagent/agent/prompt.hpp"

namespace flowagent::eval {

std::string render_user_view(std::span<const agent::Action> history) {
  std::string out;
  for (const auto& a : history) {
    std::string line;
    if (const auto* u = std::get_if<agent::UserMessage>(&a)) {
      line = "USER: " + u->text;
    } else if (const auto* b = std::get_if<agent::BotResponse>(&a)) {
      line = "BOT: " + b->text;
    } else {
      continue;
    }
    if (!out.empty()) out += '\n';
    out += line;
  }
  return out;
}

std::string build_user_prompt(const UserProfile& profile, std::string_view assistant_description,
                              std::span<const agent::Action> history,
                              const std::optional<std::string>& additional_constraints) {
  UserProfile shown = profile;
  if (additional_constraints) shown.additional_constraints = additional_constraints;
  std::string rendered = render_profile(shown);
  while (!rendered.empty() && rendered.back() == '\n') rendered.pop_back();
  return agent::render_template(agent::prompts::user_simulation(),
                                {{"assistant_description", std::string(assistant_description)},
                                 {"user_profile", rendered},
                                 {"history_conversation", render_user_view(history)}});
}

std::optional<UserReply> parse_user_response(std::string_view text) {
  auto pos = text.find("Response:");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = text.substr(pos + 9);
  // Stop at a closing code fence, if the model wrapped its answer.
  if (auto fence = rest.find("```"); fence != std::string_view::npos) rest = rest.substr(0, fence);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  if (rest.empty()) return std::nullopt;
  if (rest.find("[END]") != std::string_view::npos) return UserReply{true, {}};
  return UserReply{false, std::string(rest)};
}

UserReply simulate_user(const UserProfile& profile, std::string_view assistant_description,
                        std::span<const agent::Action> history, agent::LlmBackend& backend,
                        const std::optional<std::string>& additional_constraints) {
  const std::string prompt = build_user_prompt(profile, assistant_description, history, additional_constraints);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (auto reply = parse_user_response(backend.complete_prompt(prompt))) return *reply;
    } catch (const agent::BackendError&) {
    }
  }
  return UserReply{true, {}};
}

}  // namespace flowagent::eval
