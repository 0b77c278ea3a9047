#include "evagg/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evagg/errors.hpp"

namespace evagg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ClusterPartition partition_lc_sc(std::span<const std::size_t> sizes, double alpha, double beta) {
  if (sizes.empty()) throw EmptyInput("cannot partition an empty cluster set");
  ClusterPartition p;
  p.order.resize(sizes.size());
  std::iota(p.order.begin(), p.order.end(), std::size_t{0});
  std::stable_sort(p.order.begin(), p.order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });

  const double total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  const std::size_t k = sizes.size();
  std::size_t both = 0, cumulative = 0, ratio = 0;
  double sum = 0.0;
  for (std::size_t b = 1; b < k; ++b) {
    sum += static_cast<double>(sizes[p.order[b - 1]]);
    const bool a_ok = sum >= total * alpha;
    const double next = static_cast<double>(sizes[p.order[b]]);
    const bool b_ok = next > 0.0 && static_cast<double>(sizes[p.order[b - 1]]) / next >= beta;
    if (a_ok && b_ok && !both) both = b;
    if (a_ok && !cumulative) cumulative = b;
    if (b_ok && !ratio) ratio = b;
  }
  p.boundary_b = both ? both : cumulative ? cumulative : ratio ? ratio : k;
  p.large.assign(k, false);
  for (std::size_t i = 0; i < p.boundary_b; ++i) p.large[p.order[i]] = true;
  return p;
}

ClusterPartition partition_lc_sc(std::span<const EventCluster> clusters, double alpha, double beta) {
  std::vector<std::size_t> sizes;
  sizes.reserve(clusters.size());
  for (const auto& c : clusters) sizes.push_back(c.size());
  return partition_lc_sc(sizes, alpha, beta);
}

LdcofModel::LdcofModel(std::span<const EventCluster> clusters, const ClusterPartition& partition,
                       const PipelineConfig& config, DistanceFunction distance)
    : clusters_(clusters), partition_(partition), distance_(std::move(distance)) {
  if (partition_.boundary_b == 0 && !clusters.empty()) throw NoLargeCluster("partition has no large cluster");
  if (partition_.large.size() != clusters.size()) throw Error("partition does not match cluster list");

  Timestamp origin{std::numeric_limits<std::int64_t>::max()};
  for (const auto& c : clusters) origin = std::min(origin, c.first_ts());

  sensor_of_.reserve(clusters.size());
  for (const auto& c : clusters) {
    sensor_of_.push_back(c.sensor_id);
    auto& space = spaces_[c.sensor_id];
    if (!space) space = std::make_unique<FeatureSpace>(config.sensor(c.sensor_id), config.atw_seconds, origin);
  }

  geometry_.resize(clusters.size());
  std::map<std::string, std::vector<Point>> all_points;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& space = *spaces_[sensor_of_[i]];
    auto& g = geometry_[i];
    g.points.reserve(clusters[i].size());
    for (const auto& m : clusters[i].members) g.points.push_back(space.encode(m));
    auto& pool = all_points[sensor_of_[i]];
    pool.insert(pool.end(), g.points.begin(), g.points.end());
  }
  for (auto& [sensor, pool] : all_points) spaces_[sensor]->fit(pool);

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& g = geometry_[i];
    const auto& space = *spaces_[sensor_of_[i]];
    g.centroid = space.centroid(g.points);
    double sum = 0.0;
    for (const auto& p : g.points) sum += distance_(space, p, g.centroid);
    g.distance_avg = g.points.empty() ? 0.0 : sum / static_cast<double>(g.points.size());
  }
}

LdcofScore LdcofModel::score(std::size_t cluster, std::size_t member) const {
  const auto& c = clusters_[cluster];
  const auto& space = *spaces_.at(sensor_of_[cluster]);
  const auto& p = geometry_[cluster].points.at(member);
  LdcofScore s{c.members[member].event_id, c.cluster_id, kInf, {}};

  if (partition_.large[cluster]) {
    s.nearest_large_cluster = c.cluster_id;
    const auto& g = geometry_[cluster];
    s.score = g.distance_avg > 0.0 ? distance_(space, p, g.centroid) / g.distance_avg : 0.0;
    return s;
  }

  double best = kInf;
  std::size_t nearest = clusters_.size();
  for (auto j : partition_.lc()) {
    if (sensor_of_[j] != sensor_of_[cluster]) continue;
    const double d = distance_(space, p, geometry_[j].centroid);
    if (d < best) {
      best = d;
      nearest = j;
    }
  }
  if (nearest == clusters_.size()) return s;
  s.nearest_large_cluster = clusters_[nearest].cluster_id;
  const double avg = geometry_[nearest].distance_avg;
  s.score = avg > 0.0 ? best / avg : kInf;
  return s;
}

std::vector<std::vector<LdcofScore>> LdcofModel::score_all() const {
  std::vector<std::vector<LdcofScore>> out(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    out[i].reserve(clusters_[i].size());
    for (std::size_t m = 0; m < clusters_[i].size(); ++m) out[i].push_back(score(i, m));
  }
  return out;
}

FilterResult filter_outliers(std::vector<EventCluster> clusters, const PipelineConfig& config,
                             DistanceFunction distance) {
  FilterResult r;
  if (clusters.empty()) return r;
  r.partition = partition_lc_sc(clusters, config.alpha, config.beta);
  {
    LdcofModel model(clusters, r.partition, config, std::move(distance));
    r.scores = model.score_all();
  }

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& c = clusters[i];
    const auto& scores = r.scores[i];
    if (config.filter_mode == FilterMode::strict_sc) {
      if (r.partition.large[i]) {
        r.kept.push_back(std::move(c));
      } else {
        for (const auto& s : scores) r.dropped.push_back({s.event_id, s.cluster_id, s.score, "strict-sc"});
      }
      continue;
    }

    std::vector<bool> outlier(c.size(), false);
    std::size_t n_out = 0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (scores[m].score > config.gamma_ldcof) {
        outlier[m] = true;
        ++n_out;
      }
    }
    const bool discard =
        n_out > 0 && static_cast<double>(n_out) >= config.delta_discard * static_cast<double>(c.size());
    if (discard) {
      for (std::size_t m = 0; m < c.size(); ++m) {
        r.dropped.push_back({scores[m].event_id, c.cluster_id, scores[m].score,
                             outlier[m] ? "event-score" : "cluster-discard"});
      }
      continue;
    }
    if (n_out > 0) {
      std::vector<NormalizedEvent> survivors;
      survivors.reserve(c.size() - n_out);
      for (std::size_t m = 0; m < c.size(); ++m) {
        if (outlier[m]) {
          r.dropped.push_back({scores[m].event_id, c.cluster_id, scores[m].score, "event-score"});
        } else {
          survivors.push_back(std::move(c.members[m]));
        }
      }
      c.members = std::move(survivors);
    }
    r.kept.push_back(std::move(c));
  }
  return r;
}

GammaInterval calibrate_gamma(std::span<const EventCluster> clusters, const PipelineConfig& config,
                              std::span<const std::string> drop_ids) {
  GammaInterval g;
  if (clusters.empty()) return g;
  auto partition = partition_lc_sc(clusters, config.alpha, config.beta);
  LdcofModel model(clusters, partition, config);
  const auto scores = model.score_all();
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const bool drop = std::find(drop_ids.begin(), drop_ids.end(), clusters[i].cluster_id) != drop_ids.end();
    std::vector<double> s;
    for (const auto& sc : scores[i]) s.push_back(sc.score);
    if (!drop) {
      for (double v : s) g.lower = std::max(g.lower, v);
      continue;
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    auto need = static_cast<std::size_t>(std::ceil(config.delta_discard * static_cast<double>(s.size())));
    need = std::clamp<std::size_t>(need, 1, s.size());
    g.upper = std::min(g.upper, s[need - 1]);
  }
  return g;
}

}  // namespace evagg
