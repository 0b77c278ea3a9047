#include "evagg/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "evagg/metrics.hpp"

namespace evagg {

RunResult run_pipeline(std::vector<NormalizedEvent> events, const PipelineConfig& config,
                       const RunOptions& options) {
  using Clock = std::chrono::steady_clock;

  RunResult result;
  auto& m = result.metrics;
  m.total_events = events.size();

  auto windows = split_windows(std::move(events), config.atw_seconds);
  m.windows = windows.size();

  ClusterIdGenerator ids;
  Summarizer summarizer(config);
  QualityAccumulator quality(config);
  IlrSum ilr;
  Clock::duration busy{};

  for (auto& window : windows) {
    auto t0 = Clock::now();
    auto clusters = aggregate_window(std::move(window), config, ids);
    auto t1 = Clock::now();
    busy += t1 - t0;

    m.clusters += clusters.size();
    std::vector<ClusterRecord> records;
    if (options.keep_clusters) {
      records.reserve(clusters.size());
      for (const auto& c : clusters) records.push_back({c, false});
    }

    t0 = Clock::now();
    auto filtered = filter_outliers(std::move(clusters), config);
    auto outputs = summarizer.summarize_all(filtered.kept);
    t1 = Clock::now();
    busy += t1 - t0;

    if (options.keep_clusters) {
      for (std::size_t i = 0; i < records.size(); ++i) records[i].large = filtered.partition.large[i];
      std::move(records.begin(), records.end(), std::back_inserter(result.clusters));
    }
    if (options.ilr) ilr += ilr_sum(filtered.kept, outputs, config);
    if (options.quality) quality.add_window(filtered.kept);

    m.dropped_events += filtered.dropped.size();
    std::move(filtered.dropped.begin(), filtered.dropped.end(), std::back_inserter(result.dropped));
    std::move(outputs.begin(), outputs.end(), std::back_inserter(result.outputs));
  }

  m.aggregated_events = result.outputs.size();
  m.processing_seconds = std::chrono::duration<double>(busy).count();
  if (m.total_events > 0) m.ear_percent = ear(m.total_events, m.aggregated_events);
  if (m.processing_seconds > 0.0) m.epr_events_per_sec = epr(m.total_events, m.processing_seconds);
  m.ilr = ilr.value();
  m.dunn = quality.dunn();
  m.dbi = quality.dbi();
  result.diagnostics = summarizer.diagnostics();
  m.unclassified_values = result.diagnostics.unclassified;
  return result;
}

PipelineConfig with_twl(PipelineConfig config, std::int64_t twl_seconds) {
  for (auto& s : config.sensors) s.twl_seconds = twl_seconds;
  config.atw_seconds = std::max(config.atw_seconds, twl_seconds);
  return config;
}

}  // namespace evagg
