#include "evagg/summarization.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "evagg/errors.hpp"

namespace evagg {

std::string AggregatedEvent::display(std::string_view feature) const {
  auto it = generalized_features.find(std::string(feature));
  if (it != generalized_features.end()) return it->second;
  return to_text(this->feature(feature));
}

AggregatedEvent as_aggregate(const NormalizedEvent& e, std::string cluster_id) {
  AggregatedEvent a;
  static_cast<NormalizedEvent&>(a) = e;
  a.provenance = {e.event_id};
  a.first_ts = e.timestamp;
  a.last_ts = e.timestamp;
  a.cluster_id = std::move(cluster_id);
  return a;
}

namespace {

AggregatedEvent as_aggregate(NormalizedEvent&& e, const std::string& cluster_id) {
  AggregatedEvent a;
  a.provenance = {e.event_id};
  a.first_ts = e.timestamp;
  a.last_ts = e.timestamp;
  a.cluster_id = cluster_id;
  static_cast<NormalizedEvent&>(a) = std::move(e);
  return a;
}

/// Value identity used for distinct counting: a concept label or a raw value.
std::pair<int, std::string> current_value(const AggregatedEvent& e, std::string_view feature) {
  auto it = e.generalized_features.find(std::string(feature));
  if (it != e.generalized_features.end()) return {-1, it->second};
  const auto& v = e.feature(feature);
  return {static_cast<int>(v.index()), to_text(v)};
}

}  // namespace

std::size_t distinct_value_count(std::span<const AggregatedEvent> events, std::string_view feature) {
  std::set<std::pair<int, std::string>> seen;
  for (const auto& e : events) seen.insert(current_value(e, feature));
  return seen.size();
}

std::vector<AggregatedEvent> generalize_feature(std::vector<AggregatedEvent> events, std::string_view feature,
                                                const ConceptTree& tree) {
  const std::string key(feature);
  for (auto& e : events) {
    auto it = e.generalized_features.find(key);
    if (it != e.generalized_features.end()) {
      it->second = tree.generalize(it->second);
      continue;
    }
    const auto& v = e.feature(feature);
    if (auto exact = tree.exact(v)) {
      e.generalized_features[key] = tree.label(tree.generalize(*exact));
    } else {
      e.generalized_features[key] = tree.label(tree.classify(v));
    }
  }
  return events;
}

Summarizer::Summarizer(const PipelineConfig& config) : config_(config) {}

std::optional<ConceptTree::NodeId> Summarizer::leaf_of(const ConceptTree& tree, const FeatureValue& v) {
  auto& cache = cache_[&tree];
  auto it = cache.find(v);
  if (it != cache.end()) return it->second;
  auto id = tree.try_classify(v);
  cache.emplace(v, id);
  return id;
}

namespace {

struct Item {
  AggregatedEvent event;
  /// Current concept per SFS feature, -1 while the raw value is in use.
  std::vector<ConceptTree::NodeId> concept_of;
  std::size_t hash = 0;
};

bool same_identity(const Item& a, const Item& b, std::span<const int> sfs_slot) {
  if (a.event.event_type != b.event.event_type) return false;
  const auto& av = a.event.values;
  const auto& bv = b.event.values;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const int j = sfs_slot[i];
    if (j >= 0 && a.concept_of[j] >= 0) {
      if (a.concept_of[j] != b.concept_of[j]) return false;
      continue;
    }
    if (j >= 0 && b.concept_of[j] >= 0) return false;
    if (av[i] != bv[i]) return false;
  }
  return true;
}

std::size_t identity_hash(const Item& it, std::span<const int> sfs_slot) {
  std::size_t h = std::hash<std::string>{}(it.event.event_type);
  auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (std::size_t i = 0; i < it.event.values.size(); ++i) {
    const int j = sfs_slot[i];
    if (j >= 0 && it.concept_of[j] >= 0) {
      mix(0x51ed27 + static_cast<std::size_t>(it.concept_of[j]));
    } else {
      mix(hash_value(it.event.values[i]));
    }
  }
  return h;
}

void merge_items(std::vector<Item>& items, std::span<const int> sfs_slot, std::size_t& merges) {
  if (items.size() < 2) return;
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;
  std::vector<Item> out;
  out.reserve(items.size());
  for (auto& it : items) {
    it.hash = identity_hash(it, sfs_slot);
    auto& bucket = buckets[it.hash];
    Item* target = nullptr;
    for (auto idx : bucket) {
      if (same_identity(out[idx], it, sfs_slot)) {
        target = &out[idx];
        break;
      }
    }
    if (!target) {
      bucket.push_back(out.size());
      out.push_back(std::move(it));
      continue;
    }
    ++merges;
    auto& rep = target->event;
    rep.merge_count += it.event.merge_count;
    rep.provenance.insert(rep.provenance.end(), std::make_move_iterator(it.event.provenance.begin()),
                          std::make_move_iterator(it.event.provenance.end()));
    rep.first_ts = std::min(rep.first_ts, it.event.first_ts);
    rep.last_ts = std::max(rep.last_ts, it.event.last_ts);
  }
  items = std::move(out);
}

}  // namespace

std::vector<AggregatedEvent> Summarizer::summarize_group(std::vector<AggregatedEvent> group) {
  if (group.empty()) return {};
  const auto& profile = config_.sensor(group.front().sensor_id);
  const auto& schema = *profile.schema;
  const std::size_t nsfs = profile.sfs.size();

  std::vector<int> sfs_slot(schema.size(), -1);
  std::vector<std::size_t> sfs_index(nsfs);
  std::vector<const ConceptTree*> trees(nsfs);
  for (std::size_t j = 0; j < nsfs; ++j) {
    sfs_index[j] = *schema.index_of(profile.sfs[j]);
    sfs_slot[sfs_index[j]] = static_cast<int>(j);
    trees[j] = &config_.tree(profile.sfs[j]);
  }

  std::vector<Item> items;
  items.reserve(group.size());
  for (auto& e : group) {
    if (e.sensor_id != profile.sensor_id) throw Error("summarize_group mixes sensors");
    Item it;
    it.concept_of.assign(nsfs, -1);
    for (std::size_t j = 0; j < nsfs; ++j) {
      auto g = e.generalized_features.find(profile.sfs[j]);
      if (g != e.generalized_features.end()) {
        it.concept_of[j] = trees[j]->require(g->second);
      } else if (auto exact = trees[j]->exact(e.values[sfs_index[j]])) {
        it.concept_of[j] = *exact;
      }
    }
    e.generalized_features.clear();
    it.event = std::move(e);
    items.push_back(std::move(it));
  }

  for (std::size_t j = 0; j < nsfs; ++j) {
    const auto& tree = *trees[j];
    const auto threshold = static_cast<std::size_t>(profile.sf_thresholds[j]);
    std::vector<bool> stuck(items.size(), false);
    for (;;) {
      std::unordered_set<ConceptTree::NodeId> concepts;
      std::unordered_set<FeatureValue, FeatureValueHash> raws;
      for (const auto& it : items) {
        if (it.concept_of[j] >= 0) {
          concepts.insert(it.concept_of[j]);
        } else {
          raws.insert(it.event.values[sfs_index[j]]);
        }
      }
      if (concepts.size() + raws.size() <= threshold) break;

      bool progress = false;
      for (std::size_t k = 0; k < items.size(); ++k) {
        auto& c = items[k].concept_of[j];
        if (c >= 0) {
          const auto up = tree.generalize(c);
          if (up != c) {
            c = up;
            progress = true;
          }
          continue;
        }
        if (stuck[k]) continue;
        const auto& raw = items[k].event.values[sfs_index[j]];
        auto leaf = is_absent(raw) ? std::nullopt : leaf_of(tree, raw);
        if (!leaf) {
          stuck[k] = true;
          if (!is_absent(raw)) {
            ++diagnostics_.unclassified;
            if (diagnostics_.samples.size() < SummaryDiagnostics::max_samples) {
              diagnostics_.samples.push_back(profile.sensor_id + "." + profile.sfs[j] + "=" + to_text(raw));
            }
          }
          continue;
        }
        c = *leaf;
        progress = true;
      }
      if (!progress) break;
      ++diagnostics_.lifts;
    }
    merge_items(items, sfs_slot, diagnostics_.merges);
  }
  if (nsfs == 0) merge_items(items, sfs_slot, diagnostics_.merges);

  std::vector<AggregatedEvent> out;
  out.reserve(items.size());
  for (auto& it : items) {
    for (std::size_t j = 0; j < nsfs; ++j) {
      if (it.concept_of[j] >= 0) it.event.generalized_features[profile.sfs[j]] = trees[j]->label(it.concept_of[j]);
    }
    out.push_back(std::move(it.event));
  }
  return out;
}

std::vector<AggregatedEvent> Summarizer::summarize_cluster(const EventCluster& cluster) {
  std::vector<AggregatedEvent> group;
  group.reserve(cluster.size());
  for (const auto& m : cluster.members) group.push_back(as_aggregate(m, cluster.cluster_id));
  return summarize_group(std::move(group));
}

std::vector<AggregatedEvent> Summarizer::summarize_cluster(EventCluster&& cluster) {
  std::vector<AggregatedEvent> group;
  group.reserve(cluster.size());
  for (auto& m : cluster.members) group.push_back(as_aggregate(std::move(m), cluster.cluster_id));
  cluster.members.clear();
  return summarize_group(std::move(group));
}

std::vector<AggregatedEvent> Summarizer::summarize_all(std::span<const EventCluster> clusters) {
  std::vector<AggregatedEvent> out;
  for (const auto& c : clusters) {
    auto part = summarize_cluster(c);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<AggregatedEvent> Summarizer::summarize_all(std::span<const AggregatedEvent> events) {
  std::vector<AggregatedEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    auto part = summarize_group({e});
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<AggregatedEvent> summarize_cluster(const EventCluster& cluster, const PipelineConfig& config) {
  return Summarizer(config).summarize_cluster(cluster);
}

std::vector<AggregatedEvent> summarize_all(std::span<const EventCluster> clusters, const PipelineConfig& config) {
  return Summarizer(config).summarize_all(clusters);
}

}  // namespace evagg
