#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evagg/aggregation.hpp"
#include "evagg/config.hpp"
#include "evagg/feature_space.hpp"

namespace evagg {

struct ClusterPartition {
  /// Cluster indices by size, largest first; equal sizes keep input order.
  std::vector<std::size_t> order;
  /// Number of large clusters; `order[0..b)` is LC, the rest SC.
  std::size_t boundary_b = 0;
  /// Indexed by input position.
  std::vector<bool> large;

  std::span<const std::size_t> lc() const { return std::span(order).first(boundary_b); }
  std::span<const std::size_t> sc() const { return std::span(order).subspan(boundary_b); }
};

/// Smallest b meeting both the cumulative-size test (sum of the b largest
/// clusters >= alpha * total) and the ratio test (|C_b| / |C_b+1| >= beta); if
/// no b meets both, the smallest meeting the cumulative test, then the
/// smallest meeting the ratio test. With no such b every cluster is large.
/// Throws EmptyInput for no clusters.
ClusterPartition partition_lc_sc(std::span<const std::size_t> sizes, double alpha, double beta);
ClusterPartition partition_lc_sc(std::span<const EventCluster> clusters, double alpha, double beta);

struct LdcofScore {
  std::string event_id;
  std::string cluster_id;
  /// +inf when the reference cluster has zero spread and the event is not
  /// one of its members, or when the sensor has no large cluster.
  double score = 0.0;
  std::string nearest_large_cluster;
};

/// Centroids, spreads and encoded members of a scored set of clusters.
/// Small-cluster events are compared only with large clusters of their own
/// sensor, since sensors do not share a feature space.
class LdcofModel {
 public:
  /// Throws NoLargeCluster when the partition has no large cluster.
  LdcofModel(std::span<const EventCluster> clusters, const ClusterPartition& partition,
             const PipelineConfig& config, DistanceFunction distance = gower_distance);

  LdcofScore score(std::size_t cluster, std::size_t member) const;
  std::vector<std::vector<LdcofScore>> score_all() const;

  const Point& centroid(std::size_t cluster) const { return geometry_[cluster].centroid; }
  double distance_avg(std::size_t cluster) const { return geometry_[cluster].distance_avg; }
  const Point& point(std::size_t cluster, std::size_t member) const { return geometry_[cluster].points[member]; }
  const FeatureSpace& space(std::size_t cluster) const { return *spaces_.at(sensor_of_[cluster]); }

 private:
  struct Geometry {
    std::vector<Point> points;
    Point centroid;
    double distance_avg = 0.0;
  };

  std::span<const EventCluster> clusters_;
  ClusterPartition partition_;
  DistanceFunction distance_;
  std::vector<std::string> sensor_of_;
  std::map<std::string, std::unique_ptr<FeatureSpace>> spaces_;
  std::vector<Geometry> geometry_;
};

struct DroppedEvent {
  std::string event_id;
  std::string cluster_id;
  double score = 0.0;
  /// `event-score`, `cluster-discard` or `strict-sc`.
  std::string reason;
};

struct FilterResult {
  ClusterPartition partition;
  std::vector<std::vector<LdcofScore>> scores;
  /// Survivors in input order, outlier events removed.
  std::vector<EventCluster> kept;
  std::vector<DroppedEvent> dropped;
};

/// ldcof mode drops an event whose score exceeds gamma_ldcof and drops a
/// cluster whole when the dropped fraction of its members reaches
/// delta_discard. strict-sc mode keeps every large cluster and drops every
/// small one.
FilterResult filter_outliers(std::vector<EventCluster> clusters, const PipelineConfig& config,
                             DistanceFunction distance = gower_distance);

/// Range [lower, upper) of gamma values under which exactly the clusters in
/// `drop_ids` are lost while every other event survives on its own score.
/// Empty when lower >= upper.
struct GammaInterval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  bool empty() const { return !(lower < upper); }
};

GammaInterval calibrate_gamma(std::span<const EventCluster> clusters, const PipelineConfig& config,
                              std::span<const std::string> drop_ids);

}  // namespace evagg
