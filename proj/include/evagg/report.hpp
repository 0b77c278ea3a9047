#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/filtration.hpp"
#include "evagg/pipeline.hpp"
#include "evagg/summarization.hpp"

namespace evagg {

/// OLF header followed by provenance, first_ts and last_ts.
std::vector<std::string> aggregated_header(const SensorProfile& profile);
/// Generalized SFS values are written as their concept labels; provenance
/// ids are joined with ';'.
std::string aggregated_row(const AggregatedEvent& e);

/// Events of other sensors are skipped.
void write_aggregated_csv(std::ostream& out, std::span<const AggregatedEvent> events, const SensorProfile& profile);

/// One `aggregated_<sensor>.csv` per configured sensor, header always
/// present. Returns the files written, in config order.
std::vector<std::filesystem::path> write_aggregated_outputs(const std::filesystem::path& dir,
                                                            std::span<const AggregatedEvent> events,
                                                            const PipelineConfig& config);

/// Total bytes of the files write_aggregated_outputs would produce.
std::size_t aggregated_storage_bytes(std::span<const AggregatedEvent> events, const PipelineConfig& config);

/// Absent metrics are JSON null.
std::string metrics_json(const RunMetrics& m);
std::vector<std::string> metrics_csv_header();
/// Absent metrics are empty cells.
std::vector<std::string> metrics_csv_cells(const RunMetrics& m);

void write_audit_csv(std::ostream& out, std::span<const DroppedEvent> dropped);
/// One JSON object per cluster.
void write_clusters_jsonl(std::ostream& out, std::span<const ClusterRecord> clusters);

/// Shortest text that reads back to the same double; `inf` for infinity.
std::string format_number(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace evagg
