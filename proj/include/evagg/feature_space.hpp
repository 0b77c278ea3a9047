#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evagg/event.hpp"
#include "evagg/profile.hpp"

namespace evagg {

/// Encoded event. Numeric dims hold NaN for absent values; categorical dims
/// hold dictionary codes, with -1 for absent.
struct Point {
  std::vector<double> num;
  std::vector<std::int32_t> cat;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Mixed-type space over a sensor's SFS features plus the event timestamp.
///
/// Integer and timestamp features are numeric, text and address features are
/// categorical. The event timestamp is the last numeric dim, measured in
/// aggregation windows from `origin`, so its range is fixed at one window.
/// Other numeric dims are scaled by the range observed in fit().
class FeatureSpace {
 public:
  FeatureSpace(const SensorProfile& profile, std::int64_t atw_seconds, Timestamp origin);

  /// Assigns dictionary codes to unseen categorical values.
  Point encode(const NormalizedEvent& e);
  /// Records numeric ranges over the given points.
  void fit(std::span<const Point> points);

  std::size_t numeric_dims() const { return num_features_.size() + 1; }
  std::size_t categorical_dims() const { return cat_features_.size(); }
  std::size_t dims() const { return numeric_dims() + categorical_dims(); }
  double range(std::size_t numeric_dim) const { return ranges_.at(numeric_dim); }
  /// Distinct codes seen in a categorical dim.
  std::size_t categories(std::size_t cat_dim) const { return dictionary_[cat_dim].size(); }
  const std::string& category_text(std::size_t cat_dim, std::int32_t code) const;

  /// Gower distance in [0,1]: mean over dims of |a-b|/range for numerics
  /// (0 when the range is 0, 1 when exactly one side is absent) and of the
  /// 0/1 mismatch for categoricals.
  double gower(const Point& a, const Point& b) const;

  /// Mean of present numeric values, mode of categorical codes with ties
  /// broken by the smaller canonical text.
  Point centroid(std::span<const Point> members) const;

  /// Euclidean embedding: numerics divided by their range, categoricals one-hot
  /// scaled by 1/sqrt(2) so that a mismatch contributes 1 to the squared norm.
  std::vector<double> dense(const Point& p) const;

 private:
  std::vector<std::size_t> num_features_;
  std::vector<std::size_t> cat_features_;
  std::int64_t atw_ms_;
  Timestamp origin_;
  std::vector<double> ranges_;
  std::vector<std::unordered_map<std::string, std::int32_t>> codes_;
  std::vector<std::vector<std::string>> dictionary_;
};

using DistanceFunction = std::function<double(const FeatureSpace&, const Point&, const Point&)>;

double gower_distance(const FeatureSpace& space, const Point& a, const Point& b);

}  // namespace evagg
