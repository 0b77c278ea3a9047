#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/event.hpp"
#include "evagg/profile.hpp"

namespace evagg {

/// Equality rule on one NSFS feature.
struct AggregationRule {
  std::string rule_id;
  std::string sensor_id;
  std::string feature;
};

/// One rule per NSFS feature, in NSFS order. Rule ids are `<sensor>-R<n>`.
std::vector<AggregationRule> make_rules(const SensorProfile& profile);

struct EventCluster {
  std::string cluster_id;
  std::string sensor_id;
  std::string event_type;
  std::string base_event_id;
  /// Chronological; the base event is first.
  std::vector<NormalizedEvent> members;

  std::size_t size() const { return members.size(); }
  Timestamp first_ts() const;
  Timestamp last_ts() const;
};

/// Groups events by sensor; each group is sorted chronologically. Throws
/// ConfigMissingSensor for events of an unconfigured sensor.
std::map<std::string, std::vector<NormalizedEvent>> classify_by_sensor(std::vector<NormalizedEvent> events,
                                                                        const PipelineConfig& config);

/// Same event type and equal values, absent matching only absent, on every
/// rule feature.
bool check_similarity(const NormalizedEvent& a, const NormalizedEvent& b, std::span<const AggregationRule> rules);

/// Issues cluster ids `C0`, `C1`, ... across windows of one run.
class ClusterIdGenerator {
 public:
  std::string next() { return "C" + std::to_string(next_++); }
  std::size_t issued() const { return next_; }

 private:
  std::size_t next_ = 0;
};

/// Forward-scan clustering of one aggregation window. Sensors are processed
/// in config order and clusters are numbered in order of their base events.
/// Each event joins the open cluster with the same event type and NSFS values
/// when its distance to that cluster's base is below the sensor's TWL;
/// otherwise it becomes the base of a new cluster.
std::vector<EventCluster> aggregate_window(std::vector<NormalizedEvent> events, const PipelineConfig& config,
                                           ClusterIdGenerator& ids);
std::vector<EventCluster> aggregate_window(std::vector<NormalizedEvent> events, const PipelineConfig& config);

/// Tumbling windows of `atw_seconds`, aligned to the earliest event. Input
/// order is irrelevant; each window is chronological. Empty windows are
/// skipped.
std::vector<std::vector<NormalizedEvent>> split_windows(std::vector<NormalizedEvent> events,
                                                        std::int64_t atw_seconds);

}  // namespace evagg
