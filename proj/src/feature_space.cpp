#include "evagg/feature_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace evagg {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::string kAbsentText;
}  // namespace

FeatureSpace::FeatureSpace(const SensorProfile& profile, std::int64_t atw_seconds, Timestamp origin)
    : atw_ms_(std::max<std::int64_t>(1, atw_seconds * 1000)), origin_(origin) {
  for (const auto& f : profile.sfs) {
    const auto idx = *profile.schema->index_of(f);
    const auto kind = (*profile.schema)[idx].kind;
    if (kind == FeatureKind::integer || kind == FeatureKind::timestamp) {
      num_features_.push_back(idx);
    } else {
      cat_features_.push_back(idx);
    }
  }
  ranges_.assign(numeric_dims(), 0.0);
  ranges_.back() = 1.0;
  codes_.resize(cat_features_.size());
  dictionary_.resize(cat_features_.size());
}

Point FeatureSpace::encode(const NormalizedEvent& e) {
  Point p;
  p.num.reserve(numeric_dims());
  for (auto idx : num_features_) {
    const auto& v = e.values[idx];
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      p.num.push_back(static_cast<double>(*i));
    } else if (const auto* t = std::get_if<Timestamp>(&v)) {
      p.num.push_back(static_cast<double>(t->epoch_ms) / static_cast<double>(atw_ms_));
    } else {
      p.num.push_back(kNaN);
    }
  }
  p.num.push_back(static_cast<double>(e.timestamp.epoch_ms - origin_.epoch_ms) / static_cast<double>(atw_ms_));

  p.cat.reserve(cat_features_.size());
  for (std::size_t d = 0; d < cat_features_.size(); ++d) {
    const auto& v = e.values[cat_features_[d]];
    if (is_absent(v)) {
      p.cat.push_back(-1);
      continue;
    }
    auto text = to_text(v);
    auto [it, inserted] = codes_[d].try_emplace(text, static_cast<std::int32_t>(dictionary_[d].size()));
    if (inserted) dictionary_[d].push_back(std::move(text));
    p.cat.push_back(it->second);
  }
  return p;
}

void FeatureSpace::fit(std::span<const Point> points) {
  for (std::size_t d = 0; d + 1 < numeric_dims(); ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : points) {
      const double v = p.num[d];
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ranges_[d] = hi > lo ? hi - lo : 0.0;
  }
}

const std::string& FeatureSpace::category_text(std::size_t cat_dim, std::int32_t code) const {
  if (code < 0) return kAbsentText;
  return dictionary_.at(cat_dim).at(static_cast<std::size_t>(code));
}

double FeatureSpace::gower(const Point& a, const Point& b) const {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.num.size(); ++d) {
    const double x = a.num[d], y = b.num[d];
    const bool nx = std::isnan(x), ny = std::isnan(y);
    if (nx || ny) {
      sum += nx == ny ? 0.0 : 1.0;
    } else if (ranges_[d] > 0.0) {
      sum += std::min(1.0, std::abs(x - y) / ranges_[d]);
    }
  }
  for (std::size_t d = 0; d < a.cat.size(); ++d) sum += a.cat[d] == b.cat[d] ? 0.0 : 1.0;
  return sum / static_cast<double>(dims());
}

Point FeatureSpace::centroid(std::span<const Point> members) const {
  Point c;
  if (members.empty()) return c;
  const std::size_t nn = members.front().num.size();
  const std::size_t nc = members.front().cat.size();
  c.num.assign(nn, kNaN);
  for (std::size_t d = 0; d < nn; ++d) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : members) {
      if (std::isnan(p.num[d])) continue;
      sum += p.num[d];
      ++n;
    }
    if (n) c.num[d] = sum / static_cast<double>(n);
  }
  c.cat.assign(nc, -1);
  std::map<std::int32_t, std::size_t> counts;
  for (std::size_t d = 0; d < nc; ++d) {
    counts.clear();
    for (const auto& p : members) ++counts[p.cat[d]];
    std::int32_t best = 0;
    std::size_t best_n = 0;
    for (const auto& [code, n] : counts) {
      if (n > best_n || (n == best_n && category_text(d, code) < category_text(d, best))) {
        best = code;
        best_n = n;
      }
    }
    c.cat[d] = best;
  }
  return c;
}

std::vector<double> FeatureSpace::dense(const Point& p) const {
  std::vector<double> out;
  for (std::size_t d = 0; d < p.num.size(); ++d) {
    const double r = ranges_[d] > 0.0 ? ranges_[d] : 1.0;
    out.push_back(std::isnan(p.num[d]) ? 0.0 : p.num[d] / r);
  }
  const double w = 1.0 / std::sqrt(2.0);
  for (std::size_t d = 0; d < p.cat.size(); ++d) {
    const std::size_t width = dictionary_[d].size() + 1;
    const std::size_t base = out.size();
    out.resize(base + width, 0.0);
    out[base + static_cast<std::size_t>(p.cat[d] + 1)] = w;
  }
  return out;
}

double gower_distance(const FeatureSpace& space, const Point& a, const Point& b) { return space.gower(a, b); }

}  // namespace evagg
