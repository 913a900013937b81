#pragma once

// Experiment reports: replicate rows, summaries and figures, with JSON and
// CSV serialisation.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spca/error.hpp"
#include "spca/stats.hpp"

namespace spca {

inline void to_json(nlohmann::json& j, const Summary& s) {
  j = {{"mean", s.mean}, {"sd", s.sd},   {"median", s.median}, {"q1", s.q1},
       {"q3", s.q3},     {"min", s.min}, {"max", s.max},       {"count", s.count}};
}

inline void from_json(const nlohmann::json& j, Summary& s) {
  s.mean = j.at("mean").get<double>();
  s.sd = j.at("sd").get<double>();
  s.median = j.at("median").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  s.count = j.at("count").get<std::size_t>();
}

}  // namespace spca

namespace spca::bench {

inline constexpr int kSchemaVersion = 1;

struct ReplicateRow {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string group;  // grid point, fixture or other stratum
  std::map<std::string, double> metrics;
  std::string status = "ok";
  double wall_seconds = 0.0;  // kept out of the CSV

  bool ok() const { return status == "ok"; }
  bool operator==(const ReplicateRow&) const = default;
};

struct SummaryRow {
  std::string method;
  std::string group;
  std::string metric;
  Summary stats;

  bool operator==(const SummaryRow& o) const {
    const auto& a = stats;
    const auto& b = o.stats;
    return method == o.method && group == o.group && metric == o.metric && a.mean == b.mean && a.sd == b.sd &&
           a.median == b.median && a.q1 == b.q1 && a.q3 == b.q3 && a.min == b.min && a.max == b.max &&
           a.count == b.count;
  }
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;

  bool operator==(const Series&) const = default;
};

struct Figure {
  std::string name;  // file stem
  std::string kind;  // "line", "box" or "hist"
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  std::vector<Series> series;

  bool operator==(const Figure&) const = default;
};

struct Report {
  int schema_version = kSchemaVersion;
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::vector<ReplicateRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<Figure> figures;
  nlohmann::json tables = nlohmann::json::object();

  bool operator==(const Report&) const = default;

  /// Values of one metric over successful rows matching method and group.
  std::vector<double> values(const std::string& method, const std::string& group, const std::string& metric) const {
    std::vector<double> out;
    for (const auto& r : rows) {
      if (!r.ok() || r.method != method || r.group != group) continue;
      if (auto it = r.metrics.find(metric); it != r.metrics.end()) out.push_back(it->second);
    }
    return out;
  }

  const SummaryRow* find_summary(const std::string& method, const std::string& group, const std::string& metric) const {
    for (const auto& s : summary) {
      if (s.method == method && s.group == group && s.metric == metric) return &s;
    }
    return nullptr;
  }

  /// Adds one summary row per (method, group, metric) found in the rows, in first-seen order.
  void summarize_rows() {
    summary.clear();
    std::vector<std::tuple<std::string, std::string, std::string>> keys;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& r : rows) {
      if (!r.ok()) continue;
      for (const auto& [name, _] : r.metrics) {
        auto key = std::make_tuple(r.method, r.group, name);
        if (seen.insert(key).second) keys.push_back(key);
      }
    }
    for (const auto& [m, g, metric] : keys) summary.push_back({m, g, metric, summarize(values(m, g, metric))});
  }
};

inline void to_json(nlohmann::json& j, const ReplicateRow& r) {
  j = {{"replicate", r.replicate}, {"seed", r.seed},       {"method", r.method},
       {"group", r.group},         {"metrics", r.metrics}, {"status", r.status},
       {"wall_seconds", r.wall_seconds}};
}

inline void from_json(const nlohmann::json& j, ReplicateRow& r) {
  r.replicate = j.at("replicate").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.method = j.at("method").get<std::string>();
  r.group = j.at("group").get<std::string>();
  r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  r.status = j.at("status").get<std::string>();
  r.wall_seconds = j.value("wall_seconds", 0.0);
}

inline void to_json(nlohmann::json& j, const SummaryRow& s) {
  j = {{"method", s.method}, {"group", s.group}, {"metric", s.metric}, {"stats", s.stats}};
}

inline void from_json(const nlohmann::json& j, SummaryRow& s) {
  s.method = j.at("method").get<std::string>();
  s.group = j.at("group").get<std::string>();
  s.metric = j.at("metric").get<std::string>();
  s.stats = j.at("stats").get<Summary>();
}

inline void to_json(nlohmann::json& j, const Series& s) { j = {{"label", s.label}, {"x", s.x}, {"y", s.y}}; }

inline void from_json(const nlohmann::json& j, Series& s) {
  s.label = j.at("label").get<std::string>();
  s.x = j.at("x").get<std::vector<double>>();
  s.y = j.at("y").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const Figure& f) {
  j = {{"name", f.name},     {"kind", f.kind},   {"title", f.title},  {"xlabel", f.xlabel},
       {"ylabel", f.ylabel}, {"log_y", f.log_y}, {"series", f.series}};
}

inline void from_json(const nlohmann::json& j, Figure& f) {
  f.name = j.at("name").get<std::string>();
  f.kind = j.at("kind").get<std::string>();
  f.title = j.value("title", "");
  f.xlabel = j.value("xlabel", "");
  f.ylabel = j.value("ylabel", "");
  f.log_y = j.value("log_y", false);
  f.series = j.at("series").get<std::vector<Series>>();
}

inline void to_json(nlohmann::json& j, const Report& r) {
  j = {{"schema_version", r.schema_version}, {"experiment", r.experiment}, {"config", r.config},
       {"rows", r.rows},     {"summary", r.summary},   {"figures", r.figures}, {"tables", r.tables}};
}

inline void from_json(const nlohmann::json& j, Report& r) {
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kSchemaVersion) {
    throw InvalidInput("report schema version " + std::to_string(r.schema_version) + " is not supported");
  }
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.value("config", nlohmann::json::object());
  r.rows = j.at("rows").get<std::vector<ReplicateRow>>();
  r.summary = j.value("summary", std::vector<SummaryRow>{});
  r.figures = j.value("figures", std::vector<Figure>{});
  r.tables = j.value("tables", nlohmann::json::object());
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Replicate rows as CSV; metric columns are the sorted union of metric names.
inline std::string replicates_csv(const Report& report) {
  std::set<std::string> metric_names;
  for (const auto& r : report.rows) {
    for (const auto& [k, _] : r.metrics) metric_names.insert(k);
  }
  std::ostringstream out;
  out << "replicate,seed,method,group,status";
  for (const auto& m : metric_names) out << ',' << csv_escape(m);
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.replicate << ',' << r.seed << ',' << csv_escape(r.method) << ',' << csv_escape(r.group) << ','
        << csv_escape(r.status);
    for (const auto& m : metric_names) {
      out << ',';
      if (auto it = r.metrics.find(m); it != r.metrics.end()) out << format_double(it->second);
    }
    out << '\n';
  }
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace spca::bench
