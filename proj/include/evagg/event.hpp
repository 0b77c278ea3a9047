#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evagg/value.hpp"

namespace evagg {

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::text;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Ordered feature layout shared by all events of one sensor.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> specs);

  std::size_t size() const { return specs_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.specs_ == b.specs_;
  }

 private:
  std::vector<FeatureSpec> specs_;
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

SchemaPtr make_schema(std::vector<FeatureSpec> specs);

/// One OLF-normalized record. `values` is aligned with `schema`.
struct NormalizedEvent {
  std::string event_id;
  std::string sensor_id;
  Timestamp timestamp;
  std::string event_type;
  SchemaPtr schema;
  std::vector<FeatureValue> values;
  std::int64_t merge_count = 1;

  /// Absent when the schema has no such feature.
  const FeatureValue& feature(std::string_view name) const;
  void set_feature(std::string_view name, FeatureValue value);

  friend bool operator==(const NormalizedEvent& a, const NormalizedEvent& b);
};

/// Builds an event with every schema feature absent.
NormalizedEvent make_event(std::string event_id, std::string sensor_id, Timestamp ts,
                           std::string event_type, SchemaPtr schema);

/// Orders by (timestamp, event_id); stable for full ties.
bool chronological_less(const NormalizedEvent& a, const NormalizedEvent& b);
void chronological_sort(std::vector<NormalizedEvent>& events);

}  // namespace evagg
