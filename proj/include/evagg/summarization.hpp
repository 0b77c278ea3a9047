#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evagg/aggregation.hpp"
#include "evagg/concept_tree.hpp"
#include "evagg/config.hpp"
#include "evagg/event.hpp"

namespace evagg {

/// Summarized representative of one or more events of a cluster.
///
/// The inherited fields are those of the earliest constituent, with
/// merge_count summed. `generalized_features` holds the concept label of every
/// SFS feature whose value is a concept-tree node; the inherited raw value of
/// such a feature is that of the earliest constituent.
struct AggregatedEvent : NormalizedEvent {
  std::map<std::string, std::string> generalized_features;
  std::vector<std::string> provenance;
  Timestamp first_ts;
  Timestamp last_ts;
  std::string cluster_id;

  /// Generalized label when present, otherwise the raw value's text.
  std::string display(std::string_view feature) const;

  friend bool operator==(const AggregatedEvent&, const AggregatedEvent&) = default;
};

/// Raw event as a singleton aggregate.
AggregatedEvent as_aggregate(const NormalizedEvent& e, std::string cluster_id = {});

struct SummaryDiagnostics {
  static constexpr std::size_t max_samples = 100;

  /// Values that match no leaf and therefore stay literal.
  std::size_t unclassified = 0;
  std::vector<std::string> samples;
  std::size_t lifts = 0;
  std::size_t merges = 0;
};

/// Distinct values of `feature` among the events, raw or generalized.
std::size_t distinct_value_count(std::span<const AggregatedEvent> events, std::string_view feature);

/// Lifts every value of `feature` one level: a raw value goes to its leaf, a
/// concept to its parent; the root stays. Throws NoMatchingLeaf for a raw
/// value without a leaf.
std::vector<AggregatedEvent> generalize_feature(std::vector<AggregatedEvent> events, std::string_view feature,
                                                const ConceptTree& tree);

class Summarizer {
 public:
  explicit Summarizer(const PipelineConfig& config);

  /// For each SFS feature in order, lifts values while the distinct count
  /// exceeds the feature threshold and some value can still rise, then merges
  /// events that agree on event type, every non-SFS value and every current
  /// SFS value.
  std::vector<AggregatedEvent> summarize_cluster(const EventCluster& cluster);
  std::vector<AggregatedEvent> summarize_cluster(EventCluster&& cluster);
  /// Same procedure over already-aggregated events of one sensor.
  std::vector<AggregatedEvent> summarize_group(std::vector<AggregatedEvent> group);

  std::vector<AggregatedEvent> summarize_all(std::span<const EventCluster> clusters);
  /// Each event is its own group.
  std::vector<AggregatedEvent> summarize_all(std::span<const AggregatedEvent> events);

  const SummaryDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::optional<ConceptTree::NodeId> leaf_of(const ConceptTree& tree, const FeatureValue& v);

  const PipelineConfig& config_;
  SummaryDiagnostics diagnostics_;
  std::unordered_map<const ConceptTree*,
                     std::unordered_map<FeatureValue, std::optional<ConceptTree::NodeId>, FeatureValueHash>>
      cache_;
};

std::vector<AggregatedEvent> summarize_cluster(const EventCluster& cluster, const PipelineConfig& config);
std::vector<AggregatedEvent> summarize_all(std::span<const EventCluster> clusters, const PipelineConfig& config);

}  // namespace evagg
