#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "evagg/aggregation.hpp"
#include "evagg/config.hpp"
#include "evagg/event.hpp"
#include "evagg/filtration.hpp"
#include "evagg/summarization.hpp"

namespace evagg {

struct RunOptions {
  /// Dunn and Davies-Bouldin over the kept clusters of every window.
  bool quality = true;
  /// ILR needs the raw constituents of every output.
  bool ilr = true;
  /// Keep the unfiltered clusters of every window in RunResult::clusters.
  bool keep_clusters = false;
};

struct RunMetrics {
  std::size_t total_events = 0;
  std::size_t aggregated_events = 0;
  std::size_t dropped_events = 0;
  std::size_t clusters = 0;
  std::size_t windows = 0;
  /// Wall time of aggregation, filtration and summarization only.
  double processing_seconds = 0.0;
  /// nullopt for an empty run.
  std::optional<double> ear_percent;
  /// nullopt when no time was measured.
  std::optional<double> epr_events_per_sec;
  double ilr = 0.0;
  std::optional<double> dunn;
  std::optional<double> dbi;
  std::size_t unclassified_values = 0;
};

struct ClusterRecord {
  EventCluster cluster;
  bool large = false;
};

struct RunResult {
  /// Window order, then kept-cluster order within a window.
  std::vector<AggregatedEvent> outputs;
  std::vector<DroppedEvent> dropped;
  std::vector<ClusterRecord> clusters;
  RunMetrics metrics;
  SummaryDiagnostics diagnostics;
};

/// Splits the events into ATW windows and runs aggregation, filtration and
/// summarization on each. Cluster ids run on across windows.
RunResult run_pipeline(std::vector<NormalizedEvent> events, const PipelineConfig& config,
                       const RunOptions& options = {});

/// Copy of `config` with every sensor's TWL set to `twl_seconds` and the ATW
/// widened to at least that length.
PipelineConfig with_twl(PipelineConfig config, std::int64_t twl_seconds);

}  // namespace evagg
