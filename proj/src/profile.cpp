#include "evagg/profile.hpp"

#include <algorithm>
#include <set>

namespace evagg {

std::string_view to_string(DetectionLevel level) {
  switch (level) {
    case DetectionLevel::network:
      return "Network";
    case DetectionLevel::host:
      return "Host";
    case DetectionLevel::application:
      return "Application";
  }
  return "Network";
}

std::optional<DetectionLevel> parse_detection_level(std::string_view name) {
  if (name == "Network" || name == "network") return DetectionLevel::network;
  if (name == "Host" || name == "host") return DetectionLevel::host;
  if (name == "Application" || name == "application") return DetectionLevel::application;
  return std::nullopt;
}

std::vector<std::string> SensorProfile::check() const {
  std::vector<std::string> problems;
  if (sensor_id.empty()) problems.push_back("sensor_id is empty");
  if (!schema) {
    problems.push_back(sensor_id + ": no feature list");
    return problems;
  }
  std::set<std::string> names;
  for (const auto& spec : schema->specs()) {
    if (spec.name.empty()) problems.push_back(sensor_id + ": empty feature name");
    if (!names.insert(spec.name).second) {
      problems.push_back(sensor_id + ": duplicate feature " + spec.name);
    }
    for (const char* fixed : {"event_id", "sensor_id", "timestamp", "event_type", "merge_count", "provenance",
                              "first_ts", "last_ts"}) {
      if (spec.name == fixed) problems.push_back(sensor_id + ": feature name " + spec.name + " is a fixed column");
    }
  }
  std::set<std::string> ns(nsfs.begin(), nsfs.end());
  for (const auto& f : nsfs) {
    if (!names.count(f)) problems.push_back(sensor_id + ": NSFS feature " + f + " not declared");
  }
  std::set<std::string> seen_sfs;
  for (const auto& f : sfs) {
    if (!names.count(f)) problems.push_back(sensor_id + ": SFS feature " + f + " not declared");
    if (ns.count(f)) problems.push_back(sensor_id + ": feature " + f + " is in both NSFS and SFS");
    if (!seen_sfs.insert(f).second) problems.push_back(sensor_id + ": SFS lists " + f + " twice");
  }
  if (sf_thresholds.size() != sfs.size()) {
    problems.push_back(sensor_id + ": sf_thresholds has " + std::to_string(sf_thresholds.size()) +
                       " entries but SFS has " + std::to_string(sfs.size()));
  }
  if (std::any_of(sf_thresholds.begin(), sf_thresholds.end(), [](int t) { return t < 1; })) {
    problems.push_back(sensor_id + ": sf_thresholds entries must be >= 1");
  }
  if (twl_seconds < 1) problems.push_back(sensor_id + ": twl_seconds must be positive");
  return problems;
}

std::vector<std::string> SensorProfile::olf_header() const {
  std::vector<std::string> header{"event_id", "sensor_id", "timestamp", "event_type"};
  if (schema) {
    for (const auto& spec : schema->specs()) header.push_back(spec.name);
  }
  header.push_back("merge_count");
  return header;
}

std::vector<Violation> validate_event(const NormalizedEvent& e, const SensorProfile& p) {
  std::vector<Violation> out;
  if (e.event_id.empty()) out.push_back({"event_id", "event_id is empty"});
  if (e.sensor_id != p.sensor_id) {
    out.push_back({"sensor_id", "sensor " + e.sensor_id + " does not match profile " + p.sensor_id});
  }
  if (e.merge_count < 1) {
    out.push_back({"merge_count", "merge_count must be >= 1, got " + std::to_string(e.merge_count)});
  }
  if (!e.schema) {
    if (!e.values.empty()) out.push_back({"features", "values without a feature schema"});
    return out;
  }
  if (e.values.size() != e.schema->size()) {
    out.push_back({"features", "value count does not match feature count"});
  }
  for (std::size_t i = 0; i < e.schema->size(); ++i) {
    const auto& spec = (*e.schema)[i];
    auto idx = p.schema ? p.schema->index_of(spec.name) : std::nullopt;
    if (!idx) {
      out.push_back({spec.name, "unknown feature " + spec.name});
      continue;
    }
    if (i >= e.values.size()) continue;
    auto kind = kind_of(e.values[i]);
    const auto expected = (*p.schema)[*idx].kind;
    if (kind && *kind != expected) {
      out.push_back({spec.name, "feature " + spec.name + " has kind " +
                                    std::string(to_string(*kind)) + ", profile declares " +
                                    std::string(to_string(expected))});
    }
  }
  return out;
}

}  // namespace evagg
