#include "evagg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "evagg/errors.hpp"
#include "evagg/time_format.hpp"

namespace evagg {

using nlohmann::json;

namespace {
constexpr std::string_view kStageNames[] = {"REC", "DEL", "INS", "ESC", "LAT", "ACT", "EXF"};
}

std::string_view to_string(Stage stage) { return kStageNames[static_cast<int>(stage)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (int i = 0; i < 7; ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

namespace {

std::string literal_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number()) return j.dump();
  throw ConfigError("scenario: unsupported literal " + j.dump());
}

ValueTemplate parse_template(const json& j) {
  ValueTemplate t;
  if (!j.is_object()) {
    t.options = {literal_text(j)};
    return t;
  }
  t.per_duplicate = j.value("per_duplicate", false);
  if (auto it = j.find("choice"); it != j.end()) {
    t.kind = ValueTemplate::Kind::choice;
    for (const auto& o : *it) t.options.push_back(literal_text(o));
    if (t.options.empty()) throw ConfigError("scenario: empty choice");
  } else if (auto it = j.find("range"); it != j.end()) {
    t.kind = ValueTemplate::Kind::range;
    if (!it->is_array() || it->size() != 2) throw ConfigError("scenario: range needs [lo, hi]");
    t.lo = (*it)[0].get<std::int64_t>();
    t.hi = (*it)[1].get<std::int64_t>();
    if (t.lo > t.hi) throw ConfigError("scenario: range lower bound exceeds upper bound");
  } else if (auto it = j.find("cidr"); it != j.end()) {
    t.kind = ValueTemplate::Kind::cidr;
    t.cidr = it->get<std::string>();
  } else if (auto it = j.find("value"); it != j.end()) {
    t.options = {literal_text(*it)};
  } else {
    throw ConfigError("scenario: value template needs choice, range, cidr or value: " + j.dump());
  }
  return t;
}

std::map<std::string, ValueTemplate> parse_features(const json& j) {
  std::map<std::string, ValueTemplate> out;
  for (const auto& [name, v] : j.items()) out.emplace(name, parse_template(v));
  return out;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec spec;
  try {
    const auto root = json::parse(text, nullptr, true, true);
    spec.seed = root.value("seed", std::uint64_t{1});
    const auto start = root.value("start", std::string("1970-01-01T00:00:00.000Z"));
    auto ts = parse_iso8601(start);
    if (!ts) throw ConfigError("scenario: bad start time '" + start + "'");
    spec.start = *ts;
    spec.duration_seconds = root.value("duration_seconds", 0.0);
    spec.duplication_factor = root.value("duplication_factor", 1.0);
    spec.dup_spacing_seconds = root.value("dup_spacing_seconds", 1.0);
    if (spec.duplication_factor < 1.0) throw ConfigError("scenario: duplication_factor must be >= 1");
    if (spec.duration_seconds < 0.0) throw ConfigError("scenario: duration_seconds must be >= 0");

    if (auto it = root.find("stages"); it != root.end()) {
      for (const auto& s : *it) {
        StageSpec st;
        const auto name = s.at("stage").get<std::string>();
        auto stage = parse_stage(name);
        if (!stage) throw ConfigError("scenario: unknown stage '" + name + "'");
        st.stage = *stage;
        st.sensor_id = s.at("sensor_id").get<std::string>();
        st.event_type = parse_template(s.at("event_type"));
        st.count = s.value("count", std::int64_t{1});
        if (st.count < 0) throw ConfigError("scenario: negative count");
        st.offset_seconds = s.value("offset_seconds", 0.0);
        if (auto ia = s.find("inter_arrival"); ia != s.end()) {
          const auto kind = ia->value("kind", std::string("fixed"));
          if (kind == "fixed") {
            st.inter_arrival.kind = InterArrival::Kind::fixed;
          } else if (kind == "exponential") {
            st.inter_arrival.kind = InterArrival::Kind::exponential;
          } else {
            throw ConfigError("scenario: unknown inter_arrival kind '" + kind + "'");
          }
          st.inter_arrival.seconds = ia->value("seconds", 1.0);
          if (st.inter_arrival.seconds < 0.0) throw ConfigError("scenario: negative inter-arrival time");
        }
        if (auto f = s.find("features"); f != s.end()) st.features = parse_features(*f);
        spec.stages.push_back(std::move(st));
      }
    }
    if (auto it = root.find("background"); it != root.end()) {
      for (const auto& b : *it) {
        BackgroundSpec bg;
        bg.sensor_id = b.at("sensor_id").get<std::string>();
        bg.rate_per_second = b.value("rate_per_second", 0.0);
        if (bg.rate_per_second < 0.0) throw ConfigError("scenario: negative background rate");
        bg.event_types = b.at("event_types").get<std::vector<std::string>>();
        if (bg.event_types.empty()) throw ConfigError("scenario: background needs event_types");
        if (auto f = b.find("features"); f != b.end()) bg.features = parse_features(*f);
        spec.background.push_back(std::move(bg));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

ScenarioSpec scale(ScenarioSpec spec, std::int64_t factor) {
  if (factor < 1) throw Error("scale factor must be >= 1");
  const auto f = static_cast<double>(factor);
  for (auto& s : spec.stages) {
    s.count *= factor;
    s.offset_seconds *= f;
  }
  spec.duration_seconds *= f;
  return spec;
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double u01() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const double n = static_cast<double>(hi - lo) + 1.0;
    return lo + static_cast<std::int64_t>(std::floor(u01() * n));
  }
  double exponential(double mean) { return -mean * std::log(1.0 - u01()); }
  bool bernoulli(double p) { return u01() < p; }

 private:
  std::mt19937_64 g_;
};

struct Compiled {
  ValueTemplate::Kind kind;
  std::size_t slot = 0;
  FeatureKind feature_kind = FeatureKind::text;
  std::vector<FeatureValue> options;
  std::int64_t lo = 0, hi = 0;
  std::uint32_t network = 0;
  std::int64_t hosts = 1;
  bool per_duplicate = false;
};

Compiled compile(const ValueTemplate& t, FeatureKind kind, std::size_t slot, const std::string& where) {
  Compiled c{t.kind, slot, kind, {}, t.lo, t.hi, 0, 1, t.per_duplicate};
  try {
    for (const auto& o : t.options) c.options.push_back(parse_value(kind, o));
  } catch (const TypeMismatch& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (t.kind == ValueTemplate::Kind::range && kind != FeatureKind::integer && kind != FeatureKind::text) {
    throw ConfigError(where + ": range needs an integer or text feature");
  }
  if (t.kind == ValueTemplate::Kind::cidr) {
    if (kind != FeatureKind::ipaddr && kind != FeatureKind::text) {
      throw ConfigError(where + ": cidr needs an ipaddr or text feature");
    }
    auto slash = t.cidr.find('/');
    auto net = IpAddress::parse(t.cidr.substr(0, slash));
    if (slash == std::string::npos || !net || !net->is_v4()) throw ConfigError(where + ": bad IPv4 cidr " + t.cidr);
    const int prefix = std::stoi(t.cidr.substr(slash + 1));
    if (prefix < 0 || prefix > 32) throw ConfigError(where + ": bad cidr prefix in " + t.cidr);
    c.hosts = std::int64_t{1} << (32 - prefix);
    const std::uint32_t mask = prefix == 0 ? 0 : ~std::uint32_t{0} << (32 - prefix);
    c.network = net->v4_value() & mask;
  }
  return c;
}

FeatureValue draw(const Compiled& c, Rng& rng) {
  switch (c.kind) {
    case ValueTemplate::Kind::literal:
      return c.options.front();
    case ValueTemplate::Kind::choice:
      return c.options[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(c.options.size()) - 1))];
    case ValueTemplate::Kind::range: {
      const auto v = rng.uniform(c.lo, c.hi);
      if (c.feature_kind == FeatureKind::text) return std::to_string(v);
      return v;
    }
    case ValueTemplate::Kind::cidr: {
      const auto host = static_cast<std::uint32_t>(rng.uniform(0, c.hosts - 1));
      auto ip = IpAddress::v4(c.network | host);
      if (c.feature_kind == FeatureKind::text) return ip.to_string();
      return ip;
    }
  }
  return {};
}

struct Emitter {
  const ScenarioSpec& spec;
  Rng& rng;
  std::vector<NormalizedEvent>& out;

  std::vector<Compiled> compile_features(const std::map<std::string, ValueTemplate>& features,
                                         const SensorProfile& profile) {
    std::vector<Compiled> out_templates;
    for (const auto& [name, t] : features) {
      auto idx = profile.schema->index_of(name);
      if (!idx) throw ConfigError("scenario: sensor " + profile.sensor_id + " has no feature '" + name + "'");
      out_templates.push_back(compile(t, (*profile.schema)[*idx].kind, *idx, "scenario feature " + name));
    }
    return out_templates;
  }

  void emit(const SensorProfile& profile, std::int64_t ts_ms, std::string type,
            const std::vector<Compiled>& templates) {
    auto base = make_event({}, profile.sensor_id, Timestamp{ts_ms}, std::move(type), profile.schema);
    for (const auto& t : templates) base.values[t.slot] = draw(t, rng);

    const double f = spec.duplication_factor;
    auto copies = static_cast<std::int64_t>(std::floor(f));
    if (rng.bernoulli(f - std::floor(f))) ++copies;
    const auto spacing_ms = static_cast<std::int64_t>(std::llround(spec.dup_spacing_seconds * 1000.0));
    const auto first = out.size();
    out.push_back(std::move(base));
    for (std::int64_t d = 1; d < copies; ++d) {
      auto dup = out[first];
      dup.timestamp.epoch_ms = ts_ms + d * spacing_ms;
      for (const auto& t : templates) {
        if (t.per_duplicate) dup.values[t.slot] = draw(t, rng);
      }
      out.push_back(std::move(dup));
    }
  }
};

std::vector<std::size_t> sorted_order(const std::vector<NormalizedEvent>& events) {
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].timestamp < events[b].timestamp;
  });
  return order;
}

}  // namespace

std::vector<NormalizedEvent> generate(const ScenarioSpec& spec, const PipelineConfig& config) {
  auto profile_of = [&](const std::string& id) -> const SensorProfile& {
    const auto* p = config.find_sensor(id);
    if (!p) throw UnknownSensor("scenario references unknown sensor '" + id + "'");
    return *p;
  };

  Rng rng(spec.seed);
  std::vector<NormalizedEvent> events;
  Emitter emitter{spec, rng, events};

  for (const auto& st : spec.stages) {
    const auto& profile = profile_of(st.sensor_id);
    const auto templates = emitter.compile_features(st.features, profile);
    const auto type_template = compile(st.event_type, FeatureKind::text, 0, "scenario event_type");
    double t = static_cast<double>(spec.start.epoch_ms) / 1000.0 + st.offset_seconds;
    for (std::int64_t k = 0; k < st.count; ++k) {
      if (k > 0) {
        t += st.inter_arrival.kind == InterArrival::Kind::fixed ? st.inter_arrival.seconds
                                                                : rng.exponential(st.inter_arrival.seconds);
      }
      auto type = std::get<std::string>(draw(type_template, rng));
      emitter.emit(profile, std::llround(t * 1000.0), std::move(type), templates);
    }
  }

  const double end = static_cast<double>(spec.start.epoch_ms) / 1000.0 + spec.duration_seconds;
  for (const auto& bg : spec.background) {
    const auto& profile = profile_of(bg.sensor_id);
    if (bg.rate_per_second <= 0.0) continue;
    const auto templates = emitter.compile_features(bg.features, profile);
    double t = static_cast<double>(spec.start.epoch_ms) / 1000.0;
    for (;;) {
      t += rng.exponential(1.0 / bg.rate_per_second);
      if (t >= end) break;
      const auto& type = bg.event_types[static_cast<std::size_t>(
          rng.uniform(0, static_cast<std::int64_t>(bg.event_types.size()) - 1))];
      emitter.emit(profile, std::llround(t * 1000.0), type, templates);
    }
  }

  const auto order = sorted_order(events);
  std::vector<NormalizedEvent> out;
  out.reserve(events.size());
  for (auto i : order) {
    out.push_back(std::move(events[i]));
    out.back().event_id = "e" + std::to_string(out.size());
  }
  return out;
}

}  // namespace evagg
