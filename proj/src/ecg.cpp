#include "evagg/ecg.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "evagg/errors.hpp"

namespace evagg {

std::vector<std::string> parse_edge_spec(std::string_view spec, const PipelineConfig& config) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    auto comma = spec.find(',', pos);
    if (comma == std::string_view::npos) comma = spec.size();
    auto name = spec.substr(pos, comma - pos);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      bool known = name == "event_type" || name == "sensor_id";
      for (const auto& s : config.sensors) known = known || (s.schema && s.schema->index_of(name));
      if (!known) throw ConfigError("edge spec names unknown feature '" + std::string(name) + "'");
      if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("edge spec is empty");
  return out;
}

namespace {

template <class Event, class ValueOf>
EcgGraph build(std::span<const Event> events, std::span<const std::string> features, ValueOf value_of) {
  EcgGraph g;
  g.nodes.reserve(events.size());
  for (const auto& e : events) g.nodes.push_back(e.event_id);

  std::unordered_set<std::uint64_t> seen;
  for (const auto& f : features) {
    std::unordered_map<std::string, std::vector<std::uint32_t>> buckets;
    for (std::uint32_t i = 0; i < events.size(); ++i) {
      auto v = value_of(events[i], f);
      if (v) buckets[*v].push_back(i);
    }
    for (const auto& [_, members] : buckets) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const std::uint64_t key = (std::uint64_t{members[a]} << 32) | members[b];
          if (seen.insert(key).second) g.edges.emplace_back(members[a], members[b]);
        }
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

// The value kind is part of the key: an address and a text that spell the
// same are different values.
std::optional<std::string> raw_value(const NormalizedEvent& e, const std::string& f) {
  if (f == "event_type") return e.event_type;
  if (f == "sensor_id") return e.sensor_id;
  const auto& v = e.feature(f);
  if (is_absent(v)) return std::nullopt;
  return std::to_string(v.index()) + ':' + to_text(v);
}

}  // namespace

EcgGraph build_ecg(std::span<const NormalizedEvent> events, std::span<const std::string> features) {
  return build(events, features, raw_value);
}

EcgGraph build_ecg(std::span<const AggregatedEvent> events, std::span<const std::string> features) {
  return build(events, features, [](const AggregatedEvent& e, const std::string& f) -> std::optional<std::string> {
    auto g = e.generalized_features.find(f);
    if (g != e.generalized_features.end()) return "concept:" + g->second;
    return raw_value(e, f);
  });
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_dot(std::ostream& out, const EcgGraph& graph, std::string_view name) {
  out << "graph " << dot_quote(name) << " {\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << "  n" << i << " [label=" << dot_quote(graph.nodes[i]) << "];\n";
  }
  for (const auto& [a, b] : graph.edges) out << "  n" << a << " -- n" << b << ";\n";
  out << "}\n";
}

}  // namespace evagg
