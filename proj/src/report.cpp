#include "evagg/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "evagg/csv.hpp"
#include "evagg/errors.hpp"
#include "evagg/olf_csv.hpp"
#include "evagg/time_format.hpp"

namespace evagg {

using nlohmann::ordered_json;

std::vector<std::string> aggregated_header(const SensorProfile& profile) {
  auto h = profile.olf_header();
  h.insert(h.end(), {"provenance", "first_ts", "last_ts"});
  return h;
}

std::string aggregated_row(const AggregatedEvent& e) {
  std::string line;
  append_csv_field(line, e.event_id);
  line.push_back(',');
  append_csv_field(line, e.sensor_id);
  line.push_back(',');
  line += format_iso8601(e.timestamp);
  line.push_back(',');
  append_csv_field(line, e.event_type, e.event_type.empty());
  const auto& specs = e.schema->specs();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    line.push_back(',');
    auto g = e.generalized_features.find(specs[i].name);
    if (g != e.generalized_features.end()) {
      append_csv_field(line, g->second, g->second.empty());
      continue;
    }
    if (is_absent(e.values[i])) continue;
    const auto text = to_text(e.values[i]);
    append_csv_field(line, text, text.empty());
  }
  line.push_back(',');
  line += std::to_string(e.merge_count);
  line.push_back(',');
  std::string prov;
  for (std::size_t i = 0; i < e.provenance.size(); ++i) {
    if (i) prov.push_back(';');
    prov += e.provenance[i];
  }
  append_csv_field(line, prov);
  line.push_back(',');
  line += format_iso8601(e.first_ts);
  line.push_back(',');
  line += format_iso8601(e.last_ts);
  return line;
}

void write_aggregated_csv(std::ostream& out, std::span<const AggregatedEvent> events, const SensorProfile& profile) {
  out << csv_line(aggregated_header(profile)) << '\n';
  for (const auto& e : events) {
    if (e.sensor_id == profile.sensor_id) out << aggregated_row(e) << '\n';
  }
}

std::vector<std::filesystem::path> write_aggregated_outputs(const std::filesystem::path& dir,
                                                            std::span<const AggregatedEvent> events,
                                                            const PipelineConfig& config) {
  std::vector<std::filesystem::path> paths;
  for (const auto& s : config.sensors) {
    auto path = dir / ("aggregated_" + s.sensor_id + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_aggregated_csv(out, events, s);
    if (!out) throw IoError("write failed for " + path.string());
    paths.push_back(std::move(path));
  }
  return paths;
}

std::size_t aggregated_storage_bytes(std::span<const AggregatedEvent> events, const PipelineConfig& config) {
  std::size_t total = 0;
  for (const auto& s : config.sensors) {
    std::ostringstream out;
    write_aggregated_csv(out, events, s);
    total += out.tellp();
  }
  return total;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

ordered_json opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string metrics_json(const RunMetrics& m) {
  ordered_json j;
  j["total_events"] = m.total_events;
  j["aggregated_events"] = m.aggregated_events;
  j["dropped_events"] = m.dropped_events;
  j["clusters"] = m.clusters;
  j["windows"] = m.windows;
  j["ear_percent"] = opt(m.ear_percent);
  j["ilr"] = m.ilr;
  j["dunn"] = opt(m.dunn);
  j["dbi"] = opt(m.dbi);
  j["unclassified_values"] = m.unclassified_values;
  j["processing_seconds"] = m.processing_seconds;
  j["epr_events_per_sec"] = opt(m.epr_events_per_sec);
  return j.dump(2) + "\n";
}

std::vector<std::string> metrics_csv_header() {
  return {"total_events", "aggregated_events", "dropped_events", "clusters", "windows", "ear_percent",
          "ilr",          "dunn",              "dbi",            "processing_seconds", "epr_events_per_sec"};
}

std::vector<std::string> metrics_csv_cells(const RunMetrics& m) {
  return {std::to_string(m.total_events),
          std::to_string(m.aggregated_events),
          std::to_string(m.dropped_events),
          std::to_string(m.clusters),
          std::to_string(m.windows),
          cell(m.ear_percent),
          format_number(m.ilr),
          cell(m.dunn),
          cell(m.dbi),
          format_number(m.processing_seconds),
          cell(m.epr_events_per_sec)};
}

void write_audit_csv(std::ostream& out, std::span<const DroppedEvent> dropped) {
  out << "event_id,cluster_id,score,reason\n";
  for (const auto& d : dropped) {
    std::string line;
    append_csv_field(line, d.event_id);
    line.push_back(',');
    append_csv_field(line, d.cluster_id);
    line.push_back(',');
    line += format_number(d.score);
    line.push_back(',');
    line += d.reason;
    out << line << '\n';
  }
}

void write_clusters_jsonl(std::ostream& out, std::span<const ClusterRecord> clusters) {
  for (const auto& r : clusters) {
    const auto& c = r.cluster;
    ordered_json j;
    j["cluster_id"] = c.cluster_id;
    j["sensor_id"] = c.sensor_id;
    j["event_type"] = c.event_type;
    j["base_event_id"] = c.base_event_id;
    j["size"] = c.size();
    j["large"] = r.large;
    j["first_ts"] = format_iso8601(c.first_ts());
    j["last_ts"] = format_iso8601(c.last_ts());
    auto& members = j["members"] = ordered_json::array();
    for (const auto& e : c.members) members.push_back(e.event_id);
    out << j.dump() << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace evagg
