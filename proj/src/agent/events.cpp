#include "flowagent/agent/events.hpp"

#include <stdexcept>

namespace flowagent::agent {

Json to_json(const Event& event) {
  Json out;
  out["seq"] = event.seq;
  out["ts"] = event.ts;
  out["session_id"] = event.session_id;
  out["type"] = event.type;
  out["payload"] = event.payload;
  return out;
}

Event event_from_json(const Json& json) {
  return {json.at("seq").get<std::int64_t>(), json.at("ts").get<std::int64_t>(),
          json.at("session_id").get<std::string>(), json.at("type").get<std::string>(),
          json.value("payload", Json::object())};
}

bool is_history_event(const Event& event) {
  return event.type == "user_message" || event.type == "bot_response" || event.type == "tool_call" ||
         event.type == "tool_result" || event.type == "session_end";
}

EventLog::EventLog(const std::filesystem::path& jsonl_path) {
  file_.emplace(jsonl_path, std::ios::app);
  if (!*file_) throw std::runtime_error("cannot open event log " + jsonl_path.string());
}

Event EventLog::emit(std::string session_id, std::int64_t ts, std::string type, Json payload) {
  Event event;
  {
    std::lock_guard lock(mutex_);
    event = {static_cast<std::int64_t>(events_.size()), ts, std::move(session_id), std::move(type),
             std::move(payload)};
    events_.push_back(event);
    if (file_) *file_ << to_json(event).dump() << '\n' << std::flush;
  }
  cv_.notify_all();
  return event;
}

std::vector<Event> EventLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::vector<Event> EventLog::since(std::int64_t since) const {
  std::lock_guard lock(mutex_);
  if (since < 0) since = 0;
  if (since >= static_cast<std::int64_t>(events_.size())) return {};
  return {events_.begin() + since, events_.end()};
}

std::vector<Event> EventLog::wait_since(std::int64_t since, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  if (since < 0) since = 0;
  cv_.wait_for(lock, timeout, [&] { return static_cast<std::int64_t>(events_.size()) > since; });
  if (since >= static_cast<std::int64_t>(events_.size())) return {};
  return {events_.begin() + since, events_.end()};
}

std::int64_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::int64_t>(events_.size());
}

std::vector<Event> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Event> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(event_from_json(Json::parse(line)));
  }
  return out;
}

}  // namespace flowagent::agent
