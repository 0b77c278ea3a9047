#include "evagg/sweep.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "evagg/csv.hpp"
#include "evagg/errors.hpp"
#include "evagg/report.hpp"

namespace evagg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s, const std::string& what) {
  s = trim(s);
  std::int64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

template <class T>
std::vector<T> split_ints(std::string_view text, const std::string& what) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(static_cast<T>(parse_int(text.substr(pos, comma - pos), what)));
    pos = comma + 1;
  }
  return out;
}

SweepPoint run_point(std::string parameter, std::span<const NormalizedEvent> events, const PipelineConfig& config,
                     const RunOptions& options) {
  auto result = run_pipeline(std::vector<NormalizedEvent>(events.begin(), events.end()), config, options);
  SweepPoint p{std::move(parameter), result.metrics, aggregated_storage_bytes(result.outputs, config)};
  return p;
}

}  // namespace

std::vector<std::int64_t> parse_twl_grid(std::string_view text) {
  auto grid = split_ints<std::int64_t>(trim(text), "TWL grid");
  for (auto v : grid) {
    if (v < 1) throw ConfigError("TWL grid values must be positive");
  }
  return grid;
}

std::vector<SweepPoint> sweep_twl(std::span<const NormalizedEvent> events, const PipelineConfig& config,
                                  std::span<const std::int64_t> twl_grid, const RunOptions& options) {
  if (twl_grid.empty()) throw ConfigError("TWL grid is empty");
  std::vector<SweepPoint> points;
  for (auto twl : twl_grid) {
    if (twl < 1) throw ConfigError("TWL grid values must be positive");
    auto cfg = with_twl(config, twl);
    cfg.validate();
    points.push_back(run_point("twl=" + std::to_string(twl), events, cfg, options));
  }
  return points;
}

std::vector<ThresholdVector> parse_threshold_vectors(std::string_view text) {
  std::vector<ThresholdVector> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const std::string where = "threshold file line " + std::to_string(line_no);
    ThresholdVector v;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto semi = body.find(';', pos);
      if (semi == std::string_view::npos) semi = body.size();
      auto entry = trim(body.substr(pos, semi - pos));
      pos = semi + 1;
      if (entry.empty()) continue;
      auto space = entry.find_first_of(" \t");
      if (space == std::string_view::npos) throw ConfigError(where + ": expected 'SENSOR t1,t2,...'");
      auto sensor = std::string(entry.substr(0, space));
      if (v.count(sensor)) throw ConfigError(where + ": sensor " + sensor + " given twice");
      v[sensor] = split_ints<int>(trim(entry.substr(space + 1)), where);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ThresholdVector> load_threshold_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read threshold file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_threshold_vectors(buf.str());
}

std::string to_string(const ThresholdVector& v) {
  std::string out;
  for (const auto& [sensor, t] : v) {
    if (!out.empty()) out += ';';
    out += sensor + ' ';
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::to_string(t[i]);
  }
  return out;
}

std::vector<SweepPoint> sweep_thresholds(std::span<const NormalizedEvent> events, const PipelineConfig& config,
                                         std::span<const ThresholdVector> vectors, const RunOptions& options) {
  if (vectors.empty()) throw ConfigError("threshold sweep has no vectors");
  std::vector<SweepPoint> points;
  for (const auto& v : vectors) {
    auto cfg = config;
    for (const auto& [sensor, t] : v) {
      auto& profile = cfg.sensor(sensor);
      if (t.size() != profile.sfs.size()) {
        throw ConfigError("threshold vector for " + sensor + " has " + std::to_string(t.size()) +
                          " entries, SFS has " + std::to_string(profile.sfs.size()));
      }
      profile.sf_thresholds = t;
    }
    cfg.validate();
    points.push_back(run_point(to_string(v), events, cfg, options));
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "parameter,total_events,aggregated_events,ear_percent,epr_events_per_sec,ilr,storage_bytes\n";
  for (const auto& p : points) {
    const auto& m = p.metrics;
    std::string line;
    append_csv_field(line, p.parameter);
    line += ',' + std::to_string(m.total_events) + ',' + std::to_string(m.aggregated_events) + ',';
    if (m.ear_percent) line += format_number(*m.ear_percent);
    line += ',';
    if (m.epr_events_per_sec) line += format_number(*m.epr_events_per_sec);
    line += ',' + format_number(m.ilr) + ',' + std::to_string(p.storage_bytes);
    out << line << '\n';
  }
}

}  // namespace evagg
