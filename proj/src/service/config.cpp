#include "flowagent/service/config.hpp"

#include <charconv>
#include <sstream>

#include "flowagent/agent/workflow.hpp"

namespace flowagent::service {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

int to_int(const std::string& key, const std::string& value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  return out;
}

std::set<std::string> to_id_set(const std::string& value) {
  std::set<std::string> out;
  if (value == "none" || value.empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto id = trim(item);
    if (id.empty()) continue;
    if (id != control::kNodeDependency && id != control::kApiRepetition && id != control::kConversationLength) {
      throw std::invalid_argument("unknown controller '" + id + "'");
    }
    out.insert(id);
  }
  return out;
}

}  // namespace

void ControllerOverrides::apply(control::ControllerConfig& cfg) const {
  if (pre) cfg.enabled_pre = *pre;
  if (post) cfg.enabled_post = *post;
  if (max_identical_api_calls) cfg.max_identical_api_calls = *max_identical_api_calls;
  if (max_total_turns) cfg.max_total_turns = *max_total_turns;
  if (max_policy_retries_per_turn) cfg.max_policy_retries_per_turn = *max_policy_retries_per_turn;
  if (max_tool_calls_per_turn) cfg.max_tool_calls_per_turn = *max_tool_calls_per_turn;
}

bool ControllerOverrides::empty() const {
  return !pre && !post && !max_identical_api_calls && !max_total_turns && !max_policy_retries_per_turn &&
         !max_tool_calls_per_turn;
}

ControllerOverrides controller_overrides_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("controllers must be an object");
  ControllerOverrides o;
  for (const auto& [key, value] : j.items()) {
    if (key == "pre") {
      o.pre = value.get<std::set<std::string>>();
    } else if (key == "post") {
      o.post = value.get<std::set<std::string>>();
    } else if (key == "max_identical_api_calls") {
      o.max_identical_api_calls = value.get<int>();
    } else if (key == "max_total_turns") {
      o.max_total_turns = value.get<int>();
    } else if (key == "max_policy_retries_per_turn") {
      o.max_policy_retries_per_turn = value.get<int>();
    } else if (key == "max_tool_calls_per_turn") {
      o.max_tool_calls_per_turn = value.get<int>();
    } else {
      throw std::invalid_argument("unknown controller setting '" + key + "'");
    }
  }
  return o;
}

nlohmann::json to_json(const control::ControllerConfig& cfg) {
  return nlohmann::json{{"pre", cfg.enabled_pre},
                        {"post", cfg.enabled_post},
                        {"max_identical_api_calls", cfg.max_identical_api_calls},
                        {"max_total_turns", cfg.max_total_turns},
                        {"max_policy_retries_per_turn", cfg.max_policy_retries_per_turn},
                        {"max_tool_calls_per_turn", cfg.max_tool_calls_per_turn}};
}

void ServiceConfig::set(const std::string& key, const std::string& value) {
  if (key == "agent.kind") agent_kind = value;
  else if (key == "agent.backend") agent_backend = value;
  else if (key == "agent.classifier") {
    if (value != "template" && value != "none") throw std::invalid_argument("agent.classifier: template or none");
    agent_classifier = value;
  } else if (key == "user.backend") user_backend = value;
  else if (key == "user.profile") user_profile = value;
  else if (key == "judge.turn") judge_turn = value;
  else if (key == "judge.session") judge_session = value;
  else if (key == "tools") tools = value;
  else if (key == "controllers.pre") controllers.pre = to_id_set(value);
  else if (key == "controllers.post") controllers.post = to_id_set(value);
  else if (key == "controllers.max_identical_api_calls") controllers.max_identical_api_calls = to_int(key, value);
  else if (key == "controllers.max_total_turns") controllers.max_total_turns = to_int(key, value);
  else if (key == "controllers.max_policy_retries_per_turn") controllers.max_policy_retries_per_turn = to_int(key, value);
  else if (key == "controllers.max_tool_calls_per_turn") controllers.max_tool_calls_per_turn = to_int(key, value);
  else if (key == "runtime.temperature") runtime.params.temperature = to_double(key, value);
  else if (key == "runtime.max_tokens") runtime.params.max_tokens = to_int(key, value);
  else if (key == "runtime.current_time") current_time = value;
  else if (key == "runtime.fallback_text") runtime.fallback_text = value;
  else if (key == "runtime.closing_text") runtime.closing_text = value;
  else if (key == "simulate.hard_turn_cap") hard_turn_cap = to_int(key, value);
  else if (key == "openai.base_url") openai.base_url = value;
  else if (key == "openai.model") openai.model = value;
  else if (key == "openai.timeout_seconds") openai.timeout_seconds = to_int(key, value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::filesystem::path ServiceConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

ServiceConfig parse_config(std::string_view text, std::filesystem::path base_dir) {
  ServiceConfig cfg;
  cfg.base_dir = std::move(base_dir);
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    try {
      cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  return parse_config(agent::read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace flowagent::service
