#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/event.hpp"
#include "evagg/summarization.hpp"

namespace evagg {

/// Undirected event correlation graph. Node i is the i-th input event.
struct EcgGraph {
  std::vector<std::string> nodes;
  /// (i, j) with i < j, sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Comma-separated feature names; `event_type` and `sensor_id` are accepted
/// besides profile features. Throws ConfigError for an empty spec or a name
/// no sensor declares.
std::vector<std::string> parse_edge_spec(std::string_view spec, const PipelineConfig& config);

/// Edge between two events when they hold equal, present values for at
/// least one spec feature. Aggregated events compare their displayed values,
/// so a generalized label only equals the same label.
EcgGraph build_ecg(std::span<const NormalizedEvent> events, std::span<const std::string> features);
EcgGraph build_ecg(std::span<const AggregatedEvent> events, std::span<const std::string> features);

/// Graphviz DOT.
void write_dot(std::ostream& out, const EcgGraph& graph, std::string_view name);

}  // namespace evagg
