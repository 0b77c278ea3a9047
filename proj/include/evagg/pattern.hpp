#pragma once

#include <map>
#include <string>
#include <string_view>

namespace evagg {

/// Regex for one log format. `regex` may use grok macros such as
/// `%{IP:src_ip}` or `%{INT}`; the expanded form is matched against the whole
/// line. Captures are mapped to OLF columns through `field_map`; a capture
/// with no entry maps to the feature of the same name. The targets
/// `timestamp` and `event_type` address the fixed OLF columns.
struct ExtractionPattern {
  std::string pattern_id;
  std::string sensor_id;
  std::string regex;
  std::map<std::string, std::string> field_map;
  /// Directives of parse_time; empty means ISO-8601.
  std::string timestamp_format;
  int default_year = 1970;
};

/// Replaces `%{NAME}` and `%{NAME:capture}` with their regex bodies. Throws
/// ConfigError for unknown macro names.
std::string expand_grok(std::string_view pattern);

}  // namespace evagg
