#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evagg/event.hpp"

namespace evagg {

enum class DetectionLevel { network, host, application };

std::string_view to_string(DetectionLevel level);
std::optional<DetectionLevel> parse_detection_level(std::string_view name);

/// Per-sensor configuration.
///
/// `nsfs` features must match exactly for two events to cluster together.
/// `sfs` features are generalized against concept trees during summarization,
/// in declaration order, each with the distinct-value threshold at the same
/// position in `sf_thresholds`.
struct SensorProfile {
  std::string sensor_id;
  DetectionLevel detection_level = DetectionLevel::network;
  SchemaPtr schema;
  std::vector<std::string> nsfs;
  std::vector<std::string> sfs;
  std::vector<int> sf_thresholds;
  std::int64_t twl_seconds = 60;
  std::string pattern;

  /// Invariant violations of the profile itself, empty when consistent.
  std::vector<std::string> check() const;

  /// Column order used by OLF CSV files of this sensor.
  std::vector<std::string> olf_header() const;
};

struct Violation {
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Empty result means the event is valid for the profile.
std::vector<Violation> validate_event(const NormalizedEvent& e, const SensorProfile& p);

}  // namespace evagg
