#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace flowagent::eval {

struct UserProfile {
  std::string persona;
  std::vector<std::pair<std::string, std::string>> details;  // ordered "Name", "Sex", "Age", ...
  std::string needs;
  std::string dialogue_style;
  std::string interactive_pattern;
  std::optional<std::string> additional_constraints;  // OOW injection channel
  // Evaluation metadata; never shown to the simulated user.
  std::vector<std::string> required_nodes;

  bool operator==(const UserProfile&) const = default;
};

// Markdown in the "**Persona**:" / "**User Details**:" layout used for the
// user-simulation prompt. required_nodes is not rendered.
std::string render_profile(const UserProfile& profile);
// Inverse of render_profile; also accepts trailing spaces after lines.
// Throws std::invalid_argument when a section header is unknown.
UserProfile parse_profile_markdown(std::string_view text);

nlohmann::json to_json(const UserProfile& profile);
UserProfile profile_from_json(const nlohmann::json& json);

// .json files use to_json's layout; anything else is parsed as markdown.
UserProfile load_profile(const std::filesystem::path& path);

}  // namespace flowagent::eval
