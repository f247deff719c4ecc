#pragma once

#include <optional>
#include <span>
#include <string>

#include "flowagent/agent/action.hpp"
#include "flowagent/agent/backend.hpp"
#include "flowagent/eval/profile.hpp"

namespace flowagent::eval {

struct UserReply {
  bool end = false;
  std::string text;

  bool operator==(const UserReply&) const = default;
};

// USER/BOT text lines only; the simulated user does not see API traffic.
std::string render_user_view(std::span<const agent::Action> history);

std::string build_user_prompt(const UserProfile& profile, std::string_view assistant_description,
                              std::span<const agent::Action> history,
                              const std::optional<std::string>& additional_constraints = std::nullopt);

// "Response: xxx" -> text; "Response: [END]" -> end. nullopt when no
// Response line is present.
std::optional<UserReply> parse_user_response(std::string_view text);

// One retry on an unparseable reply or backend error, then End.
UserReply simulate_user(const UserProfile& profile, std::string_view assistant_description,
                        std::span<const agent::Action> history, agent::LlmBackend& backend,
                        const std::optional<std::string>& additional_constraints = std::nullopt);

}  // namespace flowagent::eval
