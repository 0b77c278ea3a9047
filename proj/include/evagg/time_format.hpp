#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "evagg/value.hpp"

namespace evagg {

/// `YYYY-MM-DDTHH:MM:SS.mmmZ`
std::string format_iso8601(Timestamp ts);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z`; nullopt on syntax or calendar errors.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// strptime-style parsing with a small directive set:
///   %Y %y %m %d %e %H %M %S %f %b, and %% for a literal percent.
/// A space in the format matches one or more spaces. When the format has no
/// year directive, `default_year` is used. Returns nullopt for text that does
/// not match or names an impossible date (e.g. Feb 30).
std::optional<Timestamp> parse_time(std::string_view text, std::string_view format,
                                    int default_year = 1970);

/// Days-from-civil and back, exposed for the generator and tests.
Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0, unsigned second = 0, unsigned millis = 0);

}  // namespace evagg
