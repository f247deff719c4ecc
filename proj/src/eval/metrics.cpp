#include "flowagent/eval/metrics.hpp"

#include <set>

namespace flowagent::eval {

namespace {

std::optional<double> mean(double sum, long n) {
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

bool session_in(Split split, const SessionRecord& s) {
  switch (split) {
    case Split::Overall: return true;
    case Split::IW: return s.oow_turns == 0;
    case Split::OOW: return s.oow_turns > 0;
  }
  return false;
}

bool turn_in(Split split, const TurnRecord& t) {
  return split == Split::Overall || (split == Split::OOW) == t.oow;
}

}  // namespace

const char* to_string(Split split) {
  switch (split) {
    case Split::Overall: return "overall";
    case Split::IW: return "IW";
    case Split::OOW: return "OOW";
  }
  return "?";
}

SessionRecord make_session_record(std::string session_id, std::span<const agent::Action> transcript,
                                  std::span<const std::string> required_nodes, const SessionJudgement& judgement,
                                  std::string end_reason) {
  SessionRecord rec;
  rec.session_id = std::move(session_id);
  rec.success = judgement.success;
  rec.task_progress = judgement.task_progress;
  rec.end_reason = std::move(end_reason);
  std::set<std::string> called;
  for (const auto& a : transcript) {
    if (const auto* u = std::get_if<agent::UserMessage>(&a)) {
      ++rec.user_turns;
      if (u->oow) ++rec.oow_turns;
    } else if (const auto* r = std::get_if<agent::ToolResult>(&a); r && r->ok) {
      called.insert(r->name);
    }
  }
  std::set<std::string> required(required_nodes.begin(), required_nodes.end());
  rec.tool.predicted = static_cast<long>(called.size());
  rec.tool.reference = static_cast<long>(required.size());
  for (const auto& name : called) rec.tool.matched += required.contains(name) ? 1 : 0;
  return rec;
}

MetricsReport compute_report(Split split, std::span<const TurnRecord> turns, std::span<const SessionRecord> sessions) {
  MetricsReport r;
  r.split = split;
  double consistent = 0;
  long judged_turns = 0;
  for (const auto& t : turns) {
    if (!turn_in(split, t)) continue;
    ++judged_turns;
    consistent += t.consistent ? 1.0 : 0.0;
    r.tool += t.tool;
    r.counts.turns += 1;
    r.counts.oow_turns += t.oow ? 1 : 0;
  }
  double success = 0;
  double progress = 0;
  for (const auto& s : sessions) {
    const long iw_turns = s.user_turns - s.oow_turns;
    switch (split) {
      case Split::Overall:
        r.counts.turns += s.user_turns;
        r.counts.oow_turns += s.oow_turns;
        break;
      case Split::IW: r.counts.turns += iw_turns; break;
      case Split::OOW:
        r.counts.turns += s.oow_turns;
        r.counts.oow_turns += s.oow_turns;
        break;
    }
    if (!session_in(split, s)) continue;
    ++r.counts.sessions;
    success += s.success ? 1.0 : 0.0;
    progress += s.task_progress;
    r.tool += s.tool;
  }
  r.pass_rate = mean(consistent, judged_turns);
  r.success_rate = mean(success, r.counts.sessions);
  r.task_progress = mean(progress, r.counts.sessions);
  r.tool_precision = r.tool.precision();
  r.tool_recall = r.tool.recall();
  r.tool_f1 = r.tool.f1();
  return r;
}

MetricsSummary compute_metrics(std::span<const TurnRecord> turns, std::span<const SessionRecord> sessions) {
  return {compute_report(Split::Overall, turns, sessions), compute_report(Split::IW, turns, sessions),
          compute_report(Split::OOW, turns, sessions)};
}

}  // namespace flowagent::eval
