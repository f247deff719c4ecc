#include "flowagent/agent/backend.hpp"

#include <fstream>

namespace flowagent::agent {

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries, OnExhausted on_exhausted,
                                 std::string identity)
    : entries_(std::move(entries)), on_exhausted_(on_exhausted), identity_(std::move(identity)) {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_strings(std::vector<std::string> texts,
                                                               OnExhausted on_exhausted,
                                                               std::string identity) {
  std::vector<Entry> entries;
  for (auto& t : texts) entries.push_back({std::move(t), false});
  return std::make_shared<ScriptedBackend>(std::move(entries), on_exhausted, std::move(identity));
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const nlohmann::json& json) {
  const nlohmann::json* list = &json;
  OnExhausted mode = OnExhausted::Error;
  std::string identity = "scripted";
  if (json.is_object()) {
    list = &json.at("responses");
    const std::string m = json.value("on_exhausted", std::string("error"));
    if (m == "repeat_last") {
      mode = OnExhausted::RepeatLast;
    } else if (m == "cycle") {
      mode = OnExhausted::Cycle;
    } else if (m != "error") {
      throw std::invalid_argument("unknown on_exhausted mode: " + m);
    }
    identity = json.value("identity", identity);
  }
  if (!list->is_array()) throw std::invalid_argument("scripted backend: expected a list of responses");
  std::vector<Entry> entries;
  for (const auto& item : *list) {
    if (item.is_string()) {
      entries.push_back({item.get<std::string>(), false});
    } else if (item.is_object() && item.contains("error")) {
      entries.push_back({item.at("error").get<std::string>(), true});
    } else {
      throw std::invalid_argument("scripted backend: entries must be strings or {\"error\": ...}");
    }
  }
  return std::make_shared<ScriptedBackend>(std::move(entries), mode, identity);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return from_json(nlohmann::json::parse(in));
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages,
                                      const CompletionParams&) {
  std::lock_guard lock(mutex_);
  prompts_.push_back(messages.empty() ? std::string() : messages.back().content);
  if (entries_.empty()) throw BackendError("scripted backend has no responses");
  std::size_t index = next_++;
  if (index >= entries_.size()) {
    switch (on_exhausted_) {
      case OnExhausted::Error:
        throw BackendError("scripted backend exhausted after " + std::to_string(entries_.size()) +
                           " responses");
      case OnExhausted::RepeatLast: index = entries_.size() - 1; break;
      case OnExhausted::Cycle: index %= entries_.size(); break;
    }
  }
  const auto& entry = entries_[index];
  if (entry.error) throw BackendError(entry.text);
  return entry.text;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::vector<std::string> ScriptedBackend::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

}  // namespace flowagent::agent
