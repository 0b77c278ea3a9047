#include "evagg/event.hpp"

#include <algorithm>
#include <stdexcept>

namespace evagg {

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> specs) : specs_(std::move(specs)) {}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return i;
  }
  return std::nullopt;
}

SchemaPtr make_schema(std::vector<FeatureSpec> specs) {
  return std::make_shared<const FeatureSchema>(std::move(specs));
}

const FeatureValue& NormalizedEvent::feature(std::string_view name) const {
  static const FeatureValue absent{};
  if (!schema) return absent;
  auto idx = schema->index_of(name);
  if (!idx || *idx >= values.size()) return absent;
  return values[*idx];
}

void NormalizedEvent::set_feature(std::string_view name, FeatureValue value) {
  auto idx = schema ? schema->index_of(name) : std::nullopt;
  if (!idx) throw std::out_of_range("event schema has no feature '" + std::string(name) + "'");
  if (values.size() < schema->size()) values.resize(schema->size());
  values[*idx] = std::move(value);
}

bool operator==(const NormalizedEvent& a, const NormalizedEvent& b) {
  if (a.event_id != b.event_id || a.sensor_id != b.sensor_id || a.timestamp != b.timestamp ||
      a.event_type != b.event_type || a.merge_count != b.merge_count || a.values != b.values) {
    return false;
  }
  if (a.schema == b.schema) return true;
  if (!a.schema || !b.schema) return false;
  return *a.schema == *b.schema;
}

NormalizedEvent make_event(std::string event_id, std::string sensor_id, Timestamp ts,
                           std::string event_type, SchemaPtr schema) {
  NormalizedEvent e;
  e.event_id = std::move(event_id);
  e.sensor_id = std::move(sensor_id);
  e.timestamp = ts;
  e.event_type = std::move(event_type);
  e.values.resize(schema ? schema->size() : 0);
  e.schema = std::move(schema);
  return e;
}

bool chronological_less(const NormalizedEvent& a, const NormalizedEvent& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.event_id < b.event_id;
}

void chronological_sort(std::vector<NormalizedEvent>& events) {
  std::stable_sort(events.begin(), events.end(), chronological_less);
}

}  // namespace evagg
