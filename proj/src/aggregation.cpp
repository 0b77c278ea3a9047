#include "evagg/aggregation.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "evagg/errors.hpp"

namespace evagg {

std::vector<AggregationRule> make_rules(const SensorProfile& profile) {
  std::vector<AggregationRule> rules;
  rules.reserve(profile.nsfs.size());
  for (std::size_t i = 0; i < profile.nsfs.size(); ++i) {
    rules.push_back({profile.sensor_id + "-R" + std::to_string(i + 1), profile.sensor_id, profile.nsfs[i]});
  }
  return rules;
}

Timestamp EventCluster::first_ts() const { return members.empty() ? Timestamp{} : members.front().timestamp; }

Timestamp EventCluster::last_ts() const {
  Timestamp t = first_ts();
  for (const auto& m : members) t = std::max(t, m.timestamp);
  return t;
}

std::map<std::string, std::vector<NormalizedEvent>> classify_by_sensor(std::vector<NormalizedEvent> events,
                                                                        const PipelineConfig& config) {
  std::map<std::string, std::vector<NormalizedEvent>> groups;
  for (auto& e : events) {
    const auto& profile = config.sensor(e.sensor_id);
    if (e.schema != profile.schema && (!e.schema || !profile.schema || !(*e.schema == *profile.schema))) {
      throw ConfigError("event " + e.event_id + " does not use the feature layout of sensor " + e.sensor_id);
    }
    groups[e.sensor_id].push_back(std::move(e));
  }
  for (auto& [_, group] : groups) chronological_sort(group);
  return groups;
}

bool check_similarity(const NormalizedEvent& a, const NormalizedEvent& b, std::span<const AggregationRule> rules) {
  if (a.event_type != b.event_type) return false;
  for (const auto& r : rules) {
    if (a.feature(r.feature) != b.feature(r.feature)) return false;
  }
  return true;
}

namespace {

std::size_t key_hash(const NormalizedEvent& e, std::span<const std::size_t> nsfs) {
  std::size_t h = std::hash<std::string>{}(e.event_type);
  for (auto i : nsfs) h ^= hash_value(e.values[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

bool same_key(const NormalizedEvent& a, const NormalizedEvent& b, std::span<const std::size_t> nsfs) {
  if (a.event_type != b.event_type) return false;
  for (auto i : nsfs) {
    if (a.values[i] != b.values[i]) return false;
  }
  return true;
}

void cluster_sensor(std::vector<NormalizedEvent>& group, const SensorProfile& profile, ClusterIdGenerator& ids,
                    std::vector<EventCluster>& out) {
  std::vector<std::size_t> nsfs;
  for (const auto& f : profile.nsfs) nsfs.push_back(*profile.schema->index_of(f));
  const std::int64_t twl_ms = profile.twl_seconds * 1000;

  std::unordered_map<std::size_t, std::vector<std::size_t>> open;
  for (auto& e : group) {
    auto& candidates = open[key_hash(e, nsfs)];
    std::size_t* slot = nullptr;
    for (auto& ci : candidates) {
      if (same_key(out[ci].members.front(), e, nsfs)) {
        slot = &ci;
        break;
      }
    }
    if (slot && e.timestamp.epoch_ms - out[*slot].members.front().timestamp.epoch_ms < twl_ms) {
      out[*slot].members.push_back(std::move(e));
      continue;
    }
    EventCluster c;
    c.cluster_id = ids.next();
    c.sensor_id = profile.sensor_id;
    c.event_type = e.event_type;
    c.base_event_id = e.event_id;
    c.members.push_back(std::move(e));
    const std::size_t idx = out.size();
    out.push_back(std::move(c));
    if (slot) {
      *slot = idx;
    } else {
      candidates.push_back(idx);
    }
  }
}

}  // namespace

std::vector<EventCluster> aggregate_window(std::vector<NormalizedEvent> events, const PipelineConfig& config,
                                           ClusterIdGenerator& ids) {
  auto groups = classify_by_sensor(std::move(events), config);
  std::vector<EventCluster> clusters;
  for (const auto& profile : config.sensors) {
    auto it = groups.find(profile.sensor_id);
    if (it == groups.end()) continue;
    cluster_sensor(it->second, profile, ids, clusters);
  }
  return clusters;
}

std::vector<EventCluster> aggregate_window(std::vector<NormalizedEvent> events, const PipelineConfig& config) {
  ClusterIdGenerator ids;
  return aggregate_window(std::move(events), config, ids);
}

std::vector<std::vector<NormalizedEvent>> split_windows(std::vector<NormalizedEvent> events,
                                                        std::int64_t atw_seconds) {
  std::vector<std::vector<NormalizedEvent>> windows;
  if (events.empty()) return windows;
  chronological_sort(events);
  const std::int64_t atw_ms = atw_seconds * 1000;
  const std::int64_t t0 = events.front().timestamp.epoch_ms;
  std::int64_t current = -1;
  for (auto& e : events) {
    const std::int64_t w = (e.timestamp.epoch_ms - t0) / atw_ms;
    if (w != current) {
      windows.emplace_back();
      current = w;
    }
    windows.back().push_back(std::move(e));
  }
  return windows;
}

}  // namespace evagg
