#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/event.hpp"
#include "evagg/pipeline.hpp"

namespace evagg {

struct SweepPoint {
  std::string parameter;
  RunMetrics metrics;
  std::size_t storage_bytes = 0;
};

/// One run per TWL value, every sensor set to that TWL and the ATW widened to
/// fit it. Throws ConfigError for an empty grid or a non-positive value.
std::vector<SweepPoint> sweep_twl(std::span<const NormalizedEvent> events, const PipelineConfig& config,
                                  std::span<const std::int64_t> twl_grid, const RunOptions& options = {});

/// Sensor id to threshold vector; sensors not named keep their thresholds.
using ThresholdVector = std::map<std::string, std::vector<int>>;

/// One grid point per non-blank line, `#` starting a comment. A line holds
/// one or more `SENSOR t1,t2,...` entries separated by ';'.
std::vector<ThresholdVector> parse_threshold_vectors(std::string_view text);
std::vector<ThresholdVector> load_threshold_vectors(const std::filesystem::path& path);
std::string to_string(const ThresholdVector& v);

/// One run per vector, results in the given order. Throws ConfigError for an
/// empty list or a vector that does not fit its sensor's SFS.
std::vector<SweepPoint> sweep_thresholds(std::span<const NormalizedEvent> events, const PipelineConfig& config,
                                         std::span<const ThresholdVector> vectors, const RunOptions& options = {});

/// Comma-separated positive integers, e.g. `30,60,300,3600`.
std::vector<std::int64_t> parse_twl_grid(std::string_view text);

/// Header `parameter,total_events,aggregated_events,ear_percent,epr_events_per_sec,ilr,storage_bytes`.
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

}  // namespace evagg
