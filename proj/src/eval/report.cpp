#include "flowagent/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "flowagent/agent/workflow.hpp"

namespace flowagent::eval {

using agent::Json;

namespace {

Json fraction(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_fraction(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Split split_from_string(const std::string& s) {
  if (s == "IW") return Split::IW;
  if (s == "OOW") return Split::OOW;
  if (s == "overall") return Split::Overall;
  throw std::invalid_argument("unknown split '" + s + "'");
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

struct Column {
  const char* label;
  std::optional<double> MetricsReport::*field;
};

constexpr Column kColumns[] = {
    {"Pass Rate", &MetricsReport::pass_rate},         {"Success Rate", &MetricsReport::success_rate},
    {"Task Progress", &MetricsReport::task_progress}, {"Tool P", &MetricsReport::tool_precision},
    {"Tool R", &MetricsReport::tool_recall},          {"Tool F1", &MetricsReport::tool_f1},
};

}  // namespace

Json to_json(const ToolCounts& c) {
  return Json{{"matched", c.matched}, {"predicted", c.predicted}, {"reference", c.reference}};
}

Json to_json(const MetricsReport& r) {
  Json j;
  j["split"] = to_string(r.split);
  j["pass_rate"] = fraction(r.pass_rate);
  j["success_rate"] = fraction(r.success_rate);
  j["task_progress"] = fraction(r.task_progress);
  j["tool_precision"] = fraction(r.tool_precision);
  j["tool_recall"] = fraction(r.tool_recall);
  j["tool_f1"] = fraction(r.tool_f1);
  j["counts"] = Json{{"sessions", r.counts.sessions}, {"turns", r.counts.turns}, {"oow_turns", r.counts.oow_turns}};
  j["tool_counts"] = to_json(r.tool);
  return j;
}

Json to_json(const MetricsSummary& s) {
  return Json{{"overall", to_json(s.overall)}, {"IW", to_json(s.iw)}, {"OOW", to_json(s.oow)}};
}

Json to_json(const AgentReport& r) { return Json{{"agent", r.agent}, {"metrics", to_json(r.metrics)}}; }

Json to_json(const TurnRecord& r) {
  Json j;
  j["session_id"] = r.session_id;
  j["turn_index"] = r.turn_index;
  j["oow"] = r.oow;
  j["tool_turn"] = r.tool_turn;
  j["consistent"] = r.consistent;
  if (r.judgement) {
    Json scores;
    auto put = [&](const char* k, const std::optional<int>& v) { scores[k] = v ? Json(*v) : Json(nullptr); };
    put("correctness", r.judgement->correctness);
    put("helpfulness", r.judgement->helpfulness);
    put("humanness", r.judgement->humanness);
    j["judge"] = Json{{"scores", scores}, {"consistent", r.judgement->consistent}, {"parsed", r.judgement->parsed}};
  }
  j["tool_counts"] = to_json(r.tool);
  j["reference"] = r.reference;
  j["predicted"] = r.predicted;
  j["fallback"] = r.fallback;
  return j;
}

Json to_json(const SessionRecord& r) {
  return Json{{"session_id", r.session_id},   {"success", r.success},       {"task_progress", r.task_progress},
              {"user_turns", r.user_turns},   {"oow_turns", r.oow_turns},   {"tool_counts", to_json(r.tool)},
              {"end_reason", r.end_reason}};
}

MetricsReport metrics_report_from_json(const Json& j) {
  MetricsReport r;
  r.split = split_from_string(j.at("split").get<std::string>());
  r.pass_rate = read_fraction(j, "pass_rate");
  r.success_rate = read_fraction(j, "success_rate");
  r.task_progress = read_fraction(j, "task_progress");
  r.tool_precision = read_fraction(j, "tool_precision");
  r.tool_recall = read_fraction(j, "tool_recall");
  r.tool_f1 = read_fraction(j, "tool_f1");
  const auto& c = j.at("counts");
  r.counts = {c.at("sessions").get<long>(), c.at("turns").get<long>(), c.at("oow_turns").get<long>()};
  if (j.contains("tool_counts")) {
    const auto& t = j.at("tool_counts");
    r.tool = {t.at("matched").get<long>(), t.at("predicted").get<long>(), t.at("reference").get<long>()};
  }
  return r;
}

MetricsSummary metrics_summary_from_json(const Json& j) {
  return {metrics_report_from_json(j.at("overall")), metrics_report_from_json(j.at("IW")),
          metrics_report_from_json(j.at("OOW"))};
}

AgentReport agent_report_from_json(const Json& j) {
  return {j.at("agent").get<std::string>(), metrics_summary_from_json(j.at("metrics"))};
}

std::string render_markdown_table(std::span<const AgentReport> reports) {
  std::vector<const Column*> columns;
  for (const auto& col : kColumns) {
    bool any = std::any_of(reports.begin(), reports.end(), [&](const AgentReport& r) {
      return (r.metrics.overall.*col.field).has_value();
    });
    if (any) columns.push_back(&col);
  }
  std::string header = "| Agent |";
  std::string rule = "|---|";
  for (const auto* col : columns) {
    for (const char* split : {"IW", "OOW", "All"}) {
      header += std::string(" ") + col->label + " (" + split + ") |";
      rule += "---:|";
    }
  }
  std::string out = header + "\n" + rule + "\n";
  for (const auto& r : reports) {
    out += "| " + r.agent + " |";
    for (const auto* col : columns) {
      for (const auto* rep : {&r.metrics.iw, &r.metrics.oow, &r.metrics.overall}) {
        out += " " + cell(rep->*(col->field)) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<AgentReport> load_reports(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<AgentReport> out;
  std::map<std::string, int> seen;
  for (const auto& p : paths) {
    out.push_back(agent_report_from_json(Json::parse(agent::read_file(p))));
    ++seen[out.back().agent];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (seen[out[i].agent] > 1) out[i].agent += " [" + paths[i].parent_path().filename().string() + "]";
  }
  return out;
}

}  // namespace flowagent::eval
