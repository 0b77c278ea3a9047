#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evagg/concept_tree.hpp"
#include "evagg/pattern.hpp"
#include "evagg/profile.hpp"

namespace evagg {

enum class FilterMode { ldcof, strict_sc };

std::string_view to_string(FilterMode mode);
std::optional<FilterMode> parse_filter_mode(std::string_view name);

struct PipelineConfig {
  std::int64_t atw_seconds = 120;
  double alpha = 0.75;
  double beta = 1.0;
  double gamma_ldcof = 1.5;
  double delta_discard = 0.5;
  LogBase log_base = LogBase::e;
  FilterMode filter_mode = FilterMode::ldcof;
  /// Upper bound on points per group for the Dunn and Davies-Bouldin indices.
  std::size_t quality_max_points = 2000;

  std::vector<SensorProfile> sensors;
  std::map<std::string, std::shared_ptr<const ConceptTree>> concept_trees;
  std::vector<ExtractionPattern> patterns;

  const SensorProfile* find_sensor(std::string_view sensor_id) const;
  /// Throws ConfigMissingSensor.
  const SensorProfile& sensor(std::string_view sensor_id) const;
  SensorProfile& sensor(std::string_view sensor_id);
  /// Throws ConfigError when the feature has no tree.
  const ConceptTree& tree(std::string_view feature) const;

  std::vector<std::string> check() const;
  /// Throws ConfigError listing every problem found by check().
  void validate() const;
};

/// Parses the JSON config grammar (comments allowed). Relative tree paths are
/// resolved against `base_dir`. The result is validated.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace evagg
