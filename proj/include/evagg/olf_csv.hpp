#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evagg/event.hpp"
#include "evagg/profile.hpp"

namespace evagg {

/// Absent values are written as empty unquoted fields; empty text is `""`.
std::string olf_row(const NormalizedEvent& e);
std::string csv_line(std::span<const std::string> cells);

void write_olf_csv(std::ostream& out, std::span<const NormalizedEvent> events, const SensorProfile& profile);
void write_olf_csv(const std::filesystem::path& path, std::span<const NormalizedEvent> events,
                   const SensorProfile& profile);

/// Throws HeaderMismatch when the header differs from profile.olf_header(),
/// IoError on malformed rows, TypeMismatch or MalformedTimestamp on bad cells.
std::vector<NormalizedEvent> read_olf_csv(std::istream& in, const SensorProfile& profile);
std::vector<NormalizedEvent> read_olf_csv(const std::filesystem::path& path, const SensorProfile& profile);

}  // namespace evagg
