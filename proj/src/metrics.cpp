#include "evagg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "evagg/errors.hpp"

namespace evagg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ear(std::size_t total, std::size_t aggregated) {
  if (total == 0) throw EmptyInput("EAR is undefined for zero events");
  if (aggregated > total) throw Error("aggregated count exceeds total count");
  return (1.0 - static_cast<double>(aggregated) / static_cast<double>(total)) * 100.0;
}

double epr(std::size_t processed, double seconds) {
  if (!(seconds > 0.0)) throw Error("EPR needs a positive processing time");
  return static_cast<double>(processed) / seconds;
}

double ilr(std::span<const double> ics, double lca_ic) {
  double sum = 0.0, loss = 0.0;
  for (double ic : ics) {
    sum += ic;
    loss += ic - lca_ic;
  }
  if (!(sum > 0.0)) throw ZeroInformation("information content of the concept set is zero");
  return loss / sum;
}

double ilr(const ConceptTree& tree, std::span<const ConceptTree::NodeId> concepts, LogBase base) {
  if (concepts.empty()) throw Error("ILR of an empty concept set");
  std::vector<double> ics;
  ics.reserve(concepts.size());
  for (auto c : concepts) ics.push_back(tree.information_content(c, base));
  return ilr(ics, tree.information_content(tree.lca(concepts), base));
}

namespace {

using EventIndex = std::unordered_map<std::string_view, const NormalizedEvent*>;

IlrSum ilr_over(const EventIndex& by_id, std::span<const AggregatedEvent> outputs, const PipelineConfig& config) {
  IlrSum sum;
  std::vector<ConceptTree::NodeId> concepts;
  for (const auto& out : outputs) {
    const auto& profile = config.sensor(out.sensor_id);
    const double w = static_cast<double>(out.merge_count);
    for (const auto& f : profile.sfs) {
      sum.weight += w;
      if (out.provenance.size() < 2) continue;
      const auto& tree = config.tree(f);
      concepts.clear();
      for (const auto& id : out.provenance) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw Error("provenance names unknown event " + id);
        const auto& v = it->second->feature(f);
        auto c = tree.try_classify(v);
        if (c && std::find(concepts.begin(), concepts.end(), *c) == concepts.end()) concepts.push_back(*c);
      }
      if (concepts.size() < 2) continue;
      try {
        sum.weighted += w * ilr(tree, concepts, config.log_base);
      } catch (const ZeroInformation&) {
      }
    }
  }
  return sum;
}

}  // namespace

IlrSum ilr_sum(std::span<const NormalizedEvent> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config) {
  EventIndex by_id;
  by_id.reserve(inputs.size());
  for (const auto& e : inputs) by_id.emplace(e.event_id, &e);
  return ilr_over(by_id, outputs, config);
}

IlrSum ilr_sum(std::span<const EventCluster> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config) {
  EventIndex by_id;
  for (const auto& c : inputs) {
    for (const auto& e : c.members) by_id.emplace(e.event_id, &e);
  }
  return ilr_over(by_id, outputs, config);
}

double run_ilr(std::span<const NormalizedEvent> inputs, std::span<const AggregatedEvent> outputs,
               const PipelineConfig& config) {
  return ilr_sum(inputs, outputs, config).value();
}

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> mean_of(const DenseCluster& c) {
  std::vector<double> m(c.front().size(), 0.0);
  for (const auto& p : c) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += p[i];
  }
  for (auto& x : m) x /= static_cast<double>(c.size());
  return m;
}

template <class Dist>
double dunn_generic(const std::vector<std::size_t>& sizes, Dist dist) {
  const std::size_t k = sizes.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) offset[i + 1] = offset[i] + sizes[i];
  double min_sep = kInf, max_diam = 0.0;
  for (std::size_t ci = 0; ci < k; ++ci) {
    for (std::size_t a = offset[ci]; a < offset[ci + 1]; ++a) {
      for (std::size_t b = a + 1; b < offset[k]; ++b) {
        const double d = dist(a, b);
        if (b < offset[ci + 1]) {
          max_diam = std::max(max_diam, d);
        } else {
          min_sep = std::min(min_sep, d);
        }
      }
    }
  }
  if (min_sep == 0.0) return 0.0;
  if (max_diam == 0.0) return kInf;
  return min_sep / max_diam;
}

double dbi_from(const std::vector<double>& scatter, const std::vector<std::vector<double>>& centroid_dist) {
  const std::size_t k = scatter.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = centroid_dist[i][j];
      if (d == 0.0) return kInf;
      worst = std::max(worst, (scatter[i] + scatter[j]) / d);
    }
    sum += worst;
  }
  return sum / static_cast<double>(k);
}

}  // namespace

double dunn_index(std::span<const DenseCluster> clusters) {
  if (clusters.size() < 2) throw Error("Dunn index needs at least two clusters");
  std::vector<std::size_t> sizes;
  std::vector<const std::vector<double>*> pts;
  for (const auto& c : clusters) {
    if (c.empty()) throw Error("Dunn index of an empty cluster");
    sizes.push_back(c.size());
    for (const auto& p : c) pts.push_back(&p);
  }
  return dunn_generic(sizes, [&](std::size_t a, std::size_t b) { return euclid(*pts[a], *pts[b]); });
}

double davies_bouldin(std::span<const DenseCluster> clusters) {
  if (clusters.size() < 2) throw Error("Davies-Bouldin index needs at least two clusters");
  std::vector<std::vector<double>> centroids;
  std::vector<double> scatter;
  for (const auto& c : clusters) {
    if (c.empty()) throw Error("Davies-Bouldin index of an empty cluster");
    centroids.push_back(mean_of(c));
    double s = 0.0;
    for (const auto& p : c) s += euclid(p, centroids.back());
    scatter.push_back(s / static_cast<double>(c.size()));
  }
  std::vector<std::vector<double>> cd(clusters.size(), std::vector<double>(clusters.size(), 0.0));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) cd[i][j] = cd[j][i] = euclid(centroids[i], centroids[j]);
  }
  return dbi_from(scatter, cd);
}

QualityIndices mixed_quality(const FeatureSpace& space, std::span<const std::vector<Point>> clusters) {
  if (clusters.size() < 2) throw Error("cluster quality needs at least two clusters");
  const std::size_t nn = space.numeric_dims();
  const std::size_t nc = space.categorical_dims();

  struct Scaled {
    std::vector<double> num;
    const std::vector<std::int32_t>* cat;
  };
  std::vector<std::size_t> sizes;
  std::vector<Scaled> pts;
  for (const auto& c : clusters) {
    if (c.empty()) throw Error("cluster quality of an empty cluster");
    sizes.push_back(c.size());
    for (const auto& p : c) {
      Scaled s{std::vector<double>(nn), &p.cat};
      for (std::size_t d = 0; d < nn; ++d) {
        const double r = space.range(d) > 0.0 ? space.range(d) : 1.0;
        s.num[d] = std::isnan(p.num[d]) ? 0.0 : p.num[d] / r;
      }
      pts.push_back(std::move(s));
    }
  }
  auto sq_num = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
  };

  QualityIndices q;
  q.dunn = dunn_generic(sizes, [&](std::size_t a, std::size_t b) {
    double s = sq_num(pts[a].num, pts[b].num);
    for (std::size_t d = 0; d < nc; ++d) s += (*pts[a].cat)[d] == (*pts[b].cat)[d] ? 0.0 : 1.0;
    return std::sqrt(s);
  });

  struct Centroid {
    std::vector<double> num;
    std::vector<std::map<std::int32_t, double>> freq;
    std::vector<double> sum_sq;
  };
  std::vector<Centroid> cents;
  std::vector<double> scatter;
  std::size_t offset = 0;
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const std::size_t n = sizes[ci];
    Centroid c{std::vector<double>(nn, 0.0), std::vector<std::map<std::int32_t, double>>(nc),
               std::vector<double>(nc, 0.0)};
    for (std::size_t m = 0; m < n; ++m) {
      const auto& p = pts[offset + m];
      for (std::size_t d = 0; d < nn; ++d) c.num[d] += p.num[d] / static_cast<double>(n);
      for (std::size_t d = 0; d < nc; ++d) c.freq[d][(*p.cat)[d]] += 1.0 / static_cast<double>(n);
    }
    for (std::size_t d = 0; d < nc; ++d) {
      for (const auto& [_, pk] : c.freq[d]) c.sum_sq[d] += pk * pk;
    }
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const auto& p = pts[offset + m];
      double sq = sq_num(p.num, c.num);
      for (std::size_t d = 0; d < nc; ++d) {
        const double pa = c.freq[d].at((*p.cat)[d]);
        sq += 0.5 * (1.0 - 2.0 * pa + c.sum_sq[d]);
      }
      s += std::sqrt(std::max(0.0, sq));
    }
    scatter.push_back(s / static_cast<double>(n));
    cents.push_back(std::move(c));
    offset += n;
  }
  const std::size_t k = clusters.size();
  std::vector<std::vector<double>> cd(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double sq = sq_num(cents[i].num, cents[j].num);
      for (std::size_t d = 0; d < nc; ++d) {
        const auto& a = cents[i].freq[d];
        const auto& b = cents[j].freq[d];
        double part = 0.0;
        for (const auto& [code, pa] : a) {
          auto it = b.find(code);
          const double pb = it == b.end() ? 0.0 : it->second;
          part += (pa - pb) * (pa - pb);
        }
        for (const auto& [code, pb] : b) {
          if (!a.count(code)) part += pb * pb;
        }
        sq += 0.5 * part;
      }
      cd[i][j] = cd[j][i] = std::sqrt(std::max(0.0, sq));
    }
  }
  q.dbi = dbi_from(scatter, cd);
  return q;
}

void QualityAccumulator::add_window(std::span<const EventCluster> clusters) {
  const std::size_t cap = config_.quality_max_points;
  if (cap == 0) return;
  std::map<std::string, std::vector<const EventCluster*>> by_sensor;
  for (const auto& c : clusters) {
    if (!c.members.empty()) by_sensor[c.sensor_id].push_back(&c);
  }
  for (const auto& [sensor, group] : by_sensor) {
    if (group.size() < 2) continue;
    std::size_t total = 0;
    Timestamp origin{std::numeric_limits<std::int64_t>::max()};
    for (const auto* c : group) {
      total += c->size();
      origin = std::min(origin, c->first_ts());
    }
    FeatureSpace space(config_.sensor(sensor), config_.atw_seconds, origin);
    std::vector<std::vector<Point>> points;
    std::vector<Point> pool;
    for (const auto* c : group) {
      std::size_t take = c->size();
      if (total > cap) {
        take = (c->size() * cap + total - 1) / total;
        take = std::clamp<std::size_t>(take, 1, c->size());
      }
      auto& pts = points.emplace_back();
      for (std::size_t k = 0; k < take; ++k) {
        pts.push_back(space.encode(c->members[k * c->size() / take]));
        pool.push_back(pts.back());
      }
    }
    space.fit(pool);
    const auto q = mixed_quality(space, points);
    const double w = static_cast<double>(total);
    if (std::isfinite(q.dunn)) {
      dunn_sum_ += w * q.dunn;
      dunn_weight_ += w;
    }
    if (std::isfinite(q.dbi)) {
      dbi_sum_ += w * q.dbi;
      dbi_weight_ += w;
    }
  }
}

std::optional<double> QualityAccumulator::dunn() const {
  if (dunn_weight_ == 0.0) return std::nullopt;
  return dunn_sum_ / dunn_weight_;
}

std::optional<double> QualityAccumulator::dbi() const {
  if (dbi_weight_ == 0.0) return std::nullopt;
  return dbi_sum_ / dbi_weight_;
}

}  // namespace evagg
