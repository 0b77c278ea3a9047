#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evagg/aggregation.hpp"
#include "evagg/concept_tree.hpp"
#include "evagg/config.hpp"
#include "evagg/feature_space.hpp"
#include "evagg/summarization.hpp"

namespace evagg {

/// (1 - aggregated/total) * 100. Throws EmptyInput when total is 0.
double ear(std::size_t total, std::size_t aggregated);
/// processed / seconds. Throws Error unless seconds > 0.
double epr(std::size_t processed, double seconds);

/// sum(IC(c) - IC(lca)) / sum(IC(c)). Throws ZeroInformation when the IC sum
/// is 0.
double ilr(std::span<const double> ics, double lca_ic);
double ilr(const ConceptTree& tree, std::span<const ConceptTree::NodeId> concepts, LogBase base = LogBase::e);

/// Per output and SFS feature, ILR over the distinct concepts of the
/// constituents' raw values (values matching no concept are skipped; a
/// single concept or a zero IC sum counts as no loss). The result is the mean
/// over (output, feature) pairs weighted by merge_count, 0 when there are no
/// pairs. Throws Error when provenance names an unknown input.
double run_ilr(std::span<const NormalizedEvent> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config);

/// Numerator and denominator of run_ilr, so that several batches can be
/// combined into one weighted mean.
struct IlrSum {
  double weighted = 0.0;
  double weight = 0.0;

  IlrSum& operator+=(const IlrSum& o) {
    weighted += o.weighted;
    weight += o.weight;
    return *this;
  }
  double value() const { return weight > 0.0 ? weighted / weight : 0.0; }
};

IlrSum ilr_sum(std::span<const NormalizedEvent> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config);
/// Inputs are the members of the clusters the outputs were summarized from.
IlrSum ilr_sum(std::span<const EventCluster> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config);

using DenseCluster = std::vector<std::vector<double>>;

/// min single-linkage distance between clusters / max cluster diameter.
/// +inf when every diameter is 0 and clusters are apart. Needs 2 clusters.
double dunn_index(std::span<const DenseCluster> clusters);
/// Mean over clusters of max_j (s_i + s_j) / d(centroid_i, centroid_j), with s
/// the mean member-to-centroid distance. +inf when two centroids coincide.
double davies_bouldin(std::span<const DenseCluster> clusters);

struct QualityIndices {
  double dunn = 0.0;
  double dbi = 0.0;
};

/// Both indices over encoded clusters in the Euclidean embedding of
/// FeatureSpace::dense, computed without materialising one-hot vectors.
QualityIndices mixed_quality(const FeatureSpace& space, std::span<const std::vector<Point>> clusters);

/// Event-weighted mean of the indices over (sensor, window) groups that have
/// at least two clusters. Non-finite group values are left out of the mean.
/// Groups larger than quality_max_points are subsampled deterministically,
/// keeping at least one member per cluster; 0 disables the indices.
class QualityAccumulator {
 public:
  QualityAccumulator(const PipelineConfig& config) : config_(config) {}

  void add_window(std::span<const EventCluster> clusters);

  /// nullopt when no group qualified.
  std::optional<double> dunn() const;
  std::optional<double> dbi() const;

 private:
  const PipelineConfig& config_;
  double dunn_sum_ = 0.0;
  double dunn_weight_ = 0.0;
  double dbi_sum_ = 0.0;
  double dbi_weight_ = 0.0;
};

}  // namespace evagg
