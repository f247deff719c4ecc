#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"

namespace flowagent::agent {

// One line of the JSONL event log. `ts` is the logical clock (user turn
// index) rather than wall time so logs are reproducible.
struct Event {
  std::int64_t seq = 0;
  std::int64_t ts = 0;
  std::string session_id;
  std::string type;  // an action type, or "parse_error", "backend_error", "label_skipped", ...
  Json payload = Json::object();

  bool operator==(const Event&) const = default;
};

Json to_json(const Event& event);
Event event_from_json(const Json& json);

// True for events carrying an Action that belongs to the session history.
bool is_history_event(const Event& event);

class EventSink {
 public:
  virtual ~EventSink() = default;
  // Assigns seq and returns the stored event.
  virtual Event emit(std::string session_id, std::int64_t ts, std::string type, Json payload) = 0;
};

// In-memory ordered log with optional JSONL mirroring and blocking reads for
// stream subscribers. Thread-safe.
class EventLog : public EventSink {
 public:
  EventLog() = default;
  explicit EventLog(const std::filesystem::path& jsonl_path);

  Event emit(std::string session_id, std::int64_t ts, std::string type, Json payload) override;

  std::vector<Event> events() const;
  // Events with seq >= since.
  std::vector<Event> since(std::int64_t since) const;
  // Blocks until an event with seq >= since exists or the timeout elapses.
  std::vector<Event> wait_since(std::int64_t since, std::chrono::milliseconds timeout) const;
  std::int64_t size() const;

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::vector<Event> events_;
  std::optional<std::ofstream> file_;
};

std::vector<Event> read_event_log(const std::filesystem::path& path);

}  // namespace flowagent::agent
