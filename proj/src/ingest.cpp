#include "evagg/ingest.hpp"

#include <algorithm>
#include <fstream>

#include <boost/regex.hpp>

#include "evagg/errors.hpp"
#include "evagg/olf_csv.hpp"
#include "evagg/time_format.hpp"

namespace evagg {

namespace {

constexpr int kTimestamp = -2;
constexpr int kEventType = -1;

std::vector<std::string> capture_names(std::string_view re) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 3 < re.size(); ++i) {
    if (re[i] == '\\') {
      ++i;
      continue;
    }
    if (re[i] != '(' || re[i + 1] != '?') continue;
    std::size_t start = 0;
    if (re[i + 2] == '<' && re[i + 3] != '=' && re[i + 3] != '!') {
      start = i + 3;
    } else if (re[i + 2] == 'P' && re[i + 3] == '<') {
      start = i + 4;
    } else {
      continue;
    }
    auto end = re.find('>', start);
    if (end == std::string_view::npos) break;
    names.emplace_back(re.substr(start, end - start));
  }
  return names;
}

}  // namespace

struct LineParser::Impl {
  ExtractionPattern pattern;
  SchemaPtr schema;
  boost::regex regex;
  std::vector<std::pair<std::string, int>> captures;
};

LineParser::LineParser(ExtractionPattern pattern, const SensorProfile& profile) : impl_(std::make_unique<Impl>()) {
  impl_->schema = profile.schema;
  if (pattern.sensor_id != profile.sensor_id) {
    throw ConfigError("pattern " + pattern.pattern_id + " is for sensor " + pattern.sensor_id + ", not " +
                      profile.sensor_id);
  }
  const auto expanded = expand_grok(pattern.regex);
  try {
    impl_->regex = boost::regex(expanded, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("pattern " + pattern.pattern_id + ": " + e.what());
  }
  bool has_ts = false, has_type = false;
  for (auto& name : capture_names(expanded)) {
    auto it = pattern.field_map.find(name);
    const std::string target = it == pattern.field_map.end() ? name : it->second;
    int slot = 0;
    if (target == "timestamp") {
      slot = kTimestamp;
      has_ts = true;
    } else if (target == "event_type") {
      slot = kEventType;
      has_type = true;
    } else {
      auto idx = profile.schema ? profile.schema->index_of(target) : std::nullopt;
      if (!idx) {
        throw ConfigError("pattern " + pattern.pattern_id + ": capture '" + name + "' maps to unknown feature '" +
                          target + "'");
      }
      slot = static_cast<int>(*idx);
    }
    impl_->captures.emplace_back(std::move(name), slot);
  }
  if (!has_ts || !has_type) {
    throw ConfigError("pattern " + pattern.pattern_id + " must capture timestamp and event_type");
  }
  impl_->pattern = std::move(pattern);
}

LineParser::~LineParser() = default;
LineParser::LineParser(LineParser&&) noexcept = default;
LineParser& LineParser::operator=(LineParser&&) noexcept = default;

const ExtractionPattern& LineParser::pattern() const { return impl_->pattern; }
const std::string& LineParser::sensor_id() const { return impl_->pattern.sensor_id; }

std::optional<NormalizedEvent> LineParser::parse(std::string_view line, std::string event_id) const {
  boost::match_results<std::string_view::const_iterator> m;
  if (!boost::regex_match(line.begin(), line.end(), m, impl_->regex)) return std::nullopt;

  auto e = make_event(std::move(event_id), impl_->pattern.sensor_id, Timestamp{}, {}, impl_->schema);
  for (const auto& [name, slot] : impl_->captures) {
    const auto& sub = m[name];
    if (!sub.matched) {
      if (slot == kTimestamp) throw MalformedTimestamp("timestamp capture did not participate in the match");
      continue;
    }
    auto text = line.substr(static_cast<std::size_t>(sub.first - line.begin()),
                            static_cast<std::size_t>(sub.length()));
    if (slot == kTimestamp) {
      const auto& fmt = impl_->pattern.timestamp_format;
      auto ts = fmt.empty() ? parse_iso8601(text) : parse_time(text, fmt, impl_->pattern.default_year);
      if (!ts) throw MalformedTimestamp("cannot parse timestamp '" + std::string(text) + "'");
      e.timestamp = *ts;
    } else if (slot == kEventType) {
      e.event_type = std::string(text);
    } else {
      const auto kind = (*impl_->schema)[static_cast<std::size_t>(slot)].kind;
      if (text.empty() && kind != FeatureKind::text) continue;
      e.values[static_cast<std::size_t>(slot)] = parse_value(kind, text);
    }
  }
  return e;
}

std::optional<NormalizedEvent> parse_line(std::string_view line, const LineParser& parser, std::size_t sequence) {
  return parser.parse(line, parser.sensor_id() + "-" + std::to_string(sequence));
}

void RejectLog::add(std::size_t line_no, std::string_view line, std::string reason) {
  ++count;
  if (samples.size() < max_samples) samples.push_back({line_no, std::string(line), std::move(reason)});
}

Normalizer::Normalizer(const PipelineConfig& config) {
  for (const auto& p : config.patterns) parsers_.emplace_back(p, config.sensor(p.sensor_id));
}

void Normalizer::feed(std::string_view line, std::size_t line_no, NormalizeResult& out) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  ++out.total_lines;
  for (const auto& parser : parsers_) {
    auto& seq = sequence_[parser.sensor_id()];
    try {
      auto e = parse_line(line, parser, seq + 1);
      if (!e) continue;
      ++seq;
      out.events.push_back(std::move(*e));
    } catch (const Error& err) {
      out.rejects.add(line_no, line, parser.pattern().pattern_id + ": " + err.what());
    }
    return;
  }
  out.rejects.add(line_no, line, "no pattern matched");
}

void Normalizer::normalize(std::istream& in, NormalizeResult& out) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) feed(line, ++line_no, out);
}

NormalizeResult Normalizer::normalize(std::istream& in) {
  NormalizeResult out;
  normalize(in, out);
  return out;
}

NormalizeResult Normalizer::normalize_lines(std::span<const std::string> lines) {
  NormalizeResult out;
  std::size_t line_no = 0;
  for (const auto& l : lines) feed(l, ++line_no, out);
  return out;
}

void Normalizer::normalize_file(const std::filesystem::path& path, NormalizeResult& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  normalize(in, out);
  if (in.bad()) throw IoError("read failed for " + path.string());
}

std::vector<std::filesystem::path> list_input_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return {path};
  if (!fs::is_directory(path, ec)) throw IoError("input " + path.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

NormalizeResult load_inputs(std::span<const std::filesystem::path> paths, const PipelineConfig& config) {
  NormalizeResult out;
  Normalizer normalizer(config);
  for (const auto& root : paths) {
    for (const auto& file : list_input_files(root)) {
      if (file.extension() != ".csv") {
        normalizer.normalize_file(file, out);
        continue;
      }
      std::ifstream in(file, std::ios::binary);
      if (!in) throw IoError("cannot read " + file.string());
      std::string header;
      std::getline(in, header);
      if (!header.empty() && header.back() == '\r') header.pop_back();
      const SensorProfile* owner = nullptr;
      for (const auto& s : config.sensors) {
        if (csv_line(s.olf_header()) == header) owner = &s;
      }
      if (!owner) throw HeaderMismatch(file.string() + ": header matches no configured sensor");
      in.seekg(0);
      auto events = read_olf_csv(in, *owner);
      out.total_lines += events.size();
      std::move(events.begin(), events.end(), std::back_inserter(out.events));
    }
  }
  return out;
}

}  // namespace evagg
