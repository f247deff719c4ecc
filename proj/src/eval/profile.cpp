#include "flowagent/eval/profile.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace flowagent::eval {

namespace {

constexpr const char* kPersona = "Persona";
constexpr const char* kDetails = "User Details";
constexpr const char* kNeeds = "User Needs";
constexpr const char* kStyle = "Dialogue Style";
constexpr const char* kPattern = "Interactive Pattern";
constexpr const char* kConstraints = "Additional Constraints";

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  return s;
}

void section(std::string& out, const char* title, const std::string& body) {
  if (!out.empty()) out += "\n";
  out += "**" + std::string(title) + "**:\n" + body + "\n";
}

}  // namespace

std::string render_profile(const UserProfile& p) {
  std::string out;
  section(out, kPersona, p.persona);
  std::string details;
  for (const auto& [k, v] : p.details) {
    if (!details.empty()) details += "\n";
    details += "- " + k + ": " + v;
  }
  section(out, kDetails, details);
  section(out, kNeeds, p.needs);
  section(out, kStyle, p.dialogue_style);
  section(out, kPattern, p.interactive_pattern);
  if (p.additional_constraints) section(out, kConstraints, *p.additional_constraints);
  return out;
}

UserProfile parse_profile_markdown(std::string_view text) {
  static const std::regex kHeader(R"(^\*\*(.+)\*\*:\s*$)");
  std::vector<std::pair<std::string, std::vector<std::string>>> sections;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line = rstrip(line);
    std::smatch m;
    if (std::regex_match(line, m, kHeader)) {
      sections.push_back({m[1].str(), {}});
    } else if (!sections.empty()) {
      sections.back().second.push_back(line);
    }
  }
  UserProfile p;
  for (auto& [title, lines] : sections) {
    while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string body;
    for (const auto& l : lines) {
      if (!body.empty()) body += "\n";
      body += l;
    }
    if (title == kPersona) {
      p.persona = body;
    } else if (title == kDetails) {
      for (const auto& l : lines) {
        if (l.empty()) continue;
        auto colon = l.find(": ");
        if (!l.starts_with("- ") || colon == std::string::npos) {
          throw std::invalid_argument("profile detail must look like '- Key: value': " + l);
        }
        p.details.emplace_back(l.substr(2, colon - 2), l.substr(colon + 2));
      }
    } else if (title == kNeeds) {
      p.needs = body;
    } else if (title == kStyle) {
      p.dialogue_style = body;
    } else if (title == kPattern) {
      p.interactive_pattern = body;
    } else if (title == kConstraints) {
      p.additional_constraints = body;
    } else {
      throw std::invalid_argument("unknown profile section '" + title + "'");
    }
  }
  return p;
}

nlohmann::json to_json(const UserProfile& p) {
  nlohmann::json details = nlohmann::json::array();
  for (const auto& [k, v] : p.details) details.push_back({k, v});
  nlohmann::json out = {{"persona", p.persona},
                        {"details", details},
                        {"needs", p.needs},
                        {"dialogue_style", p.dialogue_style},
                        {"interactive_pattern", p.interactive_pattern},
                        {"required_nodes", p.required_nodes}};
  if (p.additional_constraints) out["additional_constraints"] = *p.additional_constraints;
  return out;
}

UserProfile profile_from_json(const nlohmann::json& j) {
  UserProfile p;
  p.persona = j.value("persona", std::string());
  if (j.contains("details")) {
    const auto& d = j.at("details");
    if (d.is_object()) {
      for (const auto& [k, v] : d.items()) p.details.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      for (const auto& pair : d) p.details.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
  }
  p.needs = j.value("needs", std::string());
  p.dialogue_style = j.value("dialogue_style", std::string());
  p.interactive_pattern = j.value("interactive_pattern", std::string());
  if (j.contains("additional_constraints") && !j.at("additional_constraints").is_null()) {
    p.additional_constraints = j.at("additional_constraints").get<std::string>();
  }
  p.required_nodes = j.value("required_nodes", std::vector<std::string>{});
  return p;
}

UserProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") return profile_from_json(nlohmann::json::parse(ss.str()));
  return parse_profile_markdown(ss.str());
}

}  // namespace flowagent::eval
