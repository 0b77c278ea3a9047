#include "evagg/olf_csv.hpp"

#include <charconv>
#include <fstream>

#include "evagg/csv.hpp"
#include "evagg/errors.hpp"
#include "evagg/time_format.hpp"

namespace evagg {

std::string olf_row(const NormalizedEvent& e) {
  std::string line;
  append_csv_field(line, e.event_id);
  line.push_back(',');
  append_csv_field(line, e.sensor_id);
  line.push_back(',');
  line += format_iso8601(e.timestamp);
  line.push_back(',');
  append_csv_field(line, e.event_type, e.event_type.empty());
  for (const auto& v : e.values) {
    line.push_back(',');
    if (is_absent(v)) continue;
    const auto text = to_text(v);
    append_csv_field(line, text, text.empty());
  }
  line.push_back(',');
  line += std::to_string(e.merge_count);
  return line;
}

std::string csv_line(std::span<const std::string> cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line.push_back(',');
    append_csv_field(line, cells[i]);
  }
  return line;
}

void write_olf_csv(std::ostream& out, std::span<const NormalizedEvent> events, const SensorProfile& profile) {
  const auto header = profile.olf_header();
  out << csv_line(header) << '\n';
  for (const auto& e : events) out << olf_row(e) << '\n';
}

void write_olf_csv(const std::filesystem::path& path, std::span<const NormalizedEvent> events,
                   const SensorProfile& profile) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_olf_csv(out, events, profile);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<NormalizedEvent> read_olf_csv(std::istream& in, const SensorProfile& profile) {
  CsvReader reader(in);
  std::vector<CsvField> row;
  const auto expected = profile.olf_header();
  if (!reader.next(row)) throw HeaderMismatch("OLF CSV is empty, expected a header row");
  bool header_ok = row.size() == expected.size();
  for (std::size_t i = 0; header_ok && i < row.size(); ++i) header_ok = row[i].text == expected[i];
  if (!header_ok) {
    std::string got;
    for (std::size_t i = 0; i < row.size(); ++i) got += (i ? "," : "") + row[i].text;
    throw HeaderMismatch("OLF header for " + profile.sensor_id + " is '" + got + "', expected '" +
                         csv_line(expected) + "'");
  }

  std::vector<NormalizedEvent> events;
  const std::size_t nfeatures = profile.schema ? profile.schema->size() : 0;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].text.empty() && !row[0].quoted) continue;
    if (row.size() != expected.size()) {
      throw IoError("line " + std::to_string(reader.line()) + ": expected " + std::to_string(expected.size()) +
                    " fields, got " + std::to_string(row.size()));
    }
    auto ts = parse_iso8601(row[2].text);
    if (!ts) throw MalformedTimestamp("line " + std::to_string(reader.line()) + ": bad timestamp '" + row[2].text + "'");
    auto e = make_event(std::move(row[0].text), std::move(row[1].text), *ts, std::move(row[3].text), profile.schema);
    for (std::size_t f = 0; f < nfeatures; ++f) {
      const auto& cell = row[4 + f];
      if (cell.text.empty() && !cell.quoted) continue;
      e.values[f] = parse_value((*profile.schema)[f].kind, cell.text);
    }
    const auto& mc = row.back().text;
    auto [ptr, ec] = std::from_chars(mc.data(), mc.data() + mc.size(), e.merge_count);
    if (ec != std::errc{} || ptr != mc.data() + mc.size()) {
      throw TypeMismatch("line " + std::to_string(reader.line()) + ": bad merge_count '" + mc + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<NormalizedEvent> read_olf_csv(const std::filesystem::path& path, const SensorProfile& profile) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_olf_csv(in, profile);
}

}  // namespace evagg
