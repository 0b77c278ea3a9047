#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evagg/config.hpp"
#include "evagg/event.hpp"
#include "evagg/pattern.hpp"
#include "evagg/profile.hpp"

namespace evagg {

/// An ExtractionPattern compiled and bound to its sensor profile.
class LineParser {
 public:
  /// Throws ConfigError for bad regexes, unmapped captures, or a pattern that
  /// does not capture both timestamp and event_type.
  LineParser(ExtractionPattern pattern, const SensorProfile& profile);
  ~LineParser();
  LineParser(LineParser&&) noexcept;
  LineParser& operator=(LineParser&&) noexcept;

  const ExtractionPattern& pattern() const;
  const std::string& sensor_id() const;

  /// nullopt when the line does not match. Throws MalformedTimestamp or
  /// TypeMismatch when it matches but a capture cannot be converted.
  std::optional<NormalizedEvent> parse(std::string_view line, std::string event_id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single-pattern parse; the event id is `<sensor_id>-<sequence>`.
std::optional<NormalizedEvent> parse_line(std::string_view line, const LineParser& parser, std::size_t sequence);

struct RejectSample {
  std::size_t line_no = 0;
  std::string line;
  std::string reason;
};

struct RejectLog {
  static constexpr std::size_t max_samples = 100;

  std::size_t count = 0;
  std::vector<RejectSample> samples;

  void add(std::size_t line_no, std::string_view line, std::string reason);
};

struct NormalizeResult {
  std::vector<NormalizedEvent> events;
  std::size_t total_lines = 0;
  RejectLog rejects;
};

/// Dispatches lines over the configured patterns in order; the first pattern
/// that matches owns the line. Per-sensor sequence numbers continue across
/// calls, so event ids stay unique over several files.
class Normalizer {
 public:
  explicit Normalizer(const PipelineConfig& config);

  void normalize(std::istream& in, NormalizeResult& out);
  NormalizeResult normalize(std::istream& in);
  NormalizeResult normalize_lines(std::span<const std::string> lines);
  void normalize_file(const std::filesystem::path& path, NormalizeResult& out);

 private:
  void feed(std::string_view line, std::size_t line_no, NormalizeResult& out);

  std::vector<LineParser> parsers_;
  std::map<std::string, std::size_t> sequence_;
};

/// Regular files under `path` (or `path` itself), sorted by name.
std::vector<std::filesystem::path> list_input_files(const std::filesystem::path& path);

/// Reads every file under the given paths. Files ending in `.csv` are OLF
/// CSV, assigned to the sensor whose header they carry (HeaderMismatch when
/// none does); all other files are raw logs run through the Normalizer.
NormalizeResult load_inputs(std::span<const std::filesystem::path> paths, const PipelineConfig& config);

}  // namespace evagg
