#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/event.hpp"

namespace evagg {

enum class Stage { REC, DEL, INS, ESC, LAT, ACT, EXF };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

/// How one feature value is drawn.
///
/// JSON forms: a literal string or number; `{"choice": [...]}`;
/// `{"range": [lo, hi]}` for a uniform integer; `{"cidr": "10.0.0.0/24"}` for
/// a uniform IPv4 host. Adding `"per_duplicate": true` redraws the value for
/// every duplicate instead of sharing the original's value.
struct ValueTemplate {
  enum class Kind { literal, choice, range, cidr };

  Kind kind = Kind::literal;
  std::vector<std::string> options;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::string cidr;
  bool per_duplicate = false;
};

struct InterArrival {
  enum class Kind { fixed, exponential };

  Kind kind = Kind::fixed;
  double seconds = 1.0;
};

struct StageSpec {
  Stage stage = Stage::REC;
  std::string sensor_id;
  ValueTemplate event_type;
  std::int64_t count = 0;
  double offset_seconds = 0.0;
  InterArrival inter_arrival;
  std::map<std::string, ValueTemplate> features;
};

/// Benign traffic as a Poisson process over the whole scenario duration.
struct BackgroundSpec {
  std::string sensor_id;
  double rate_per_second = 0.0;
  std::vector<std::string> event_types;
  std::map<std::string, ValueTemplate> features;
};

/// Every generated original is emitted round(duplication_factor) times in
/// expectation: floor(f) copies plus one more with probability frac(f), the
/// copies spaced dup_spacing_seconds apart.
struct ScenarioSpec {
  std::uint64_t seed = 1;
  Timestamp start;
  double duration_seconds = 0.0;
  double duplication_factor = 1.0;
  double dup_spacing_seconds = 1.0;
  std::vector<StageSpec> stages;
  std::vector<BackgroundSpec> background;
};

ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Counts, stage offsets and duration multiplied by `factor`; inter-arrival
/// times, background rates and duplication unchanged. Throws Error when
/// factor < 1.
ScenarioSpec scale(ScenarioSpec spec, std::int64_t factor);

/// Deterministic for a fixed spec. The PRNG is std::mt19937_64 seeded with
/// `seed`; a draw x gives u = (x >> 11) * 2^-53 in [0,1), from which
///   uniform integer in [lo,hi]: lo + floor(u * (hi - lo + 1))
///   exponential with mean m:    -m * ln(1 - u)
///   bernoulli(p):               u < p
/// Stages are generated in order, then background sensors in order; the
/// stream is stably sorted by timestamp and ids e1..eN are assigned.
/// Throws UnknownSensor, or ConfigError for features the profile lacks.
std::vector<NormalizedEvent> generate(const ScenarioSpec& spec, const PipelineConfig& config);

}  // namespace evagg
