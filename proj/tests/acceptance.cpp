// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "evagg/concept_tree.hpp"
#include "evagg/ecg.hpp"
#include "evagg/errors.hpp"
#include "evagg/metrics.hpp"
#include "evagg/pipeline.hpp"
#include "evagg/report.hpp"
#include "evagg/sweep.hpp"
#include "test_support.hpp"

using namespace evagg;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kGoldenSeconds = 1.0;
constexpr double kIlrExpected = 0.0804;
constexpr double kIlrTolerance = 0.005;
constexpr int kOracleRounds = 200;
constexpr std::size_t kOracleMaxEvents = 100;
constexpr int kConservationRounds = 100;
constexpr std::size_t kMonotoneMinEvents = 100000;
constexpr double kMonotoneSeconds = 60.0;
constexpr double kReductionMinEar = 99.0;
constexpr double kReductionMinDup = 50.0;
constexpr std::size_t kThroughputMinEvents = 1000000;
constexpr double kThroughputMinEpr = 50000.0;
constexpr int kIdempotenceRounds = 100;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) { return format_number(v); }

std::set<std::set<std::string>> groups_of(const std::vector<AggregatedEvent>& out) {
  std::set<std::set<std::string>> g;
  for (const auto& o : out) g.insert(std::set<std::string>(o.provenance.begin(), o.provenance.end()));
  return g;
}

// The forward scan written out literally: every unconsumed event in time
// order becomes a base and absorbs each later unconsumed similar event closer
// than the TWL.
std::vector<EventCluster> brute_force(const std::vector<NormalizedEvent>& events, const PipelineConfig& cfg) {
  std::vector<EventCluster> out;
  std::size_t next = 0;
  for (const auto& profile : cfg.sensors) {
    std::vector<NormalizedEvent> mine;
    for (const auto& e : events) {
      if (e.sensor_id == profile.sensor_id) mine.push_back(e);
    }
    chronological_sort(mine);
    const auto rules = make_rules(profile);
    std::vector<bool> used(mine.size(), false);
    for (std::size_t b = 0; b < mine.size(); ++b) {
      if (used[b]) continue;
      used[b] = true;
      EventCluster c{"C" + std::to_string(next++), profile.sensor_id, mine[b].event_type, mine[b].event_id, {mine[b]}};
      for (std::size_t j = b + 1; j < mine.size(); ++j) {
        if (used[j]) continue;
        const auto diff = mine[j].timestamp.epoch_ms - mine[b].timestamp.epoch_ms;
        if (check_similarity(mine[b], mine[j], rules) && diff < profile.twl_seconds * 1000) {
          used[j] = true;
          c.members.push_back(mine[j]);
        }
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

Check golden() {
  Check c;
  const auto t0 = Clock::now();
  const auto cfg = testing::fig7_config();
  const auto events = testing::fig7_events(cfg);
  const auto clusters = aggregate_window(events, cfg);
  const std::map<std::string, std::set<std::string>> expected{
      {"C0", {"e1", "e3", "e5"}}, {"C1", {"e6", "e9"}}, {"C2", {"e2", "e4"}}, {"C3", {"e7"}},
      {"C4", {"e8"}},             {"C5", {"e10"}},      {"C6", {"e11", "e12"}}};
  c.require(testing::memberships(clusters) == expected, "cluster memberships differ");

  const auto part = partition_lc_sc(clusters, cfg.alpha, cfg.beta);
  std::set<std::string> lc;
  for (auto i : part.lc()) lc.insert(clusters[i].cluster_id);
  c.require(lc == std::set<std::string>{"C0", "C1", "C2", "C6"}, "large clusters differ");

  const auto filtered = filter_outliers(clusters, cfg);
  std::set<std::string> dropped_clusters, dropped_events;
  for (const auto& d : filtered.dropped) {
    dropped_clusters.insert(d.cluster_id);
    dropped_events.insert(d.event_id);
  }
  c.require(dropped_clusters == std::set<std::string>{"C3", "C5"}, "dropped clusters differ");
  c.require(dropped_events == std::set<std::string>{"e7", "e10"}, "dropped events differ");

  const auto outputs = summarize_all(filtered.kept, cfg);
  const std::set<std::set<std::string>> pairs{{"e1", "e3"}, {"e2", "e4"}, {"e6", "e9"},
                                              {"e11", "e12"}, {"e5"},     {"e8"}};
  c.require(outputs.size() == 6, "expected 6 aggregated events, got " + std::to_string(outputs.size()));
  c.require(groups_of(outputs) == pairs, "aggregated pairings differ");

  const auto run = run_pipeline(events, cfg);
  c.require(run.metrics.ear_percent && *run.metrics.ear_percent == 50.0,
            "EAR " + (run.metrics.ear_percent ? fmt(*run.metrics.ear_percent) : std::string("null")));
  const double secs = seconds_since(t0);
  c.require(secs < kGoldenSeconds, "took " + fmt(secs) + " s");
  if (c.ok) c.detail = "EAR 50%, " + fmt(secs) + " s";
  return c;
}

Check ilr_example() {
  Check c;
  const std::vector<double> ics{1.08, 1.16};
  const double v = ilr(ics, 1.03);
  c.require(std::abs(v - kIlrExpected) <= kIlrTolerance, "ilr " + fmt(v));
  c.detail = c.ok ? "ilr " + fmt(v) : c.detail;
  return c;
}

Check oracle_equivalence() {
  Check c;
  std::mt19937_64 rng(0xA11CE);
  for (int round = 0; round < kOracleRounds && c.ok; ++round) {
    const auto cfg = testing::random_config(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(0, kOracleMaxEvents)(rng);
    const auto events = testing::random_events(rng, cfg, n, cfg.atw_seconds);
    const auto got = aggregate_window(events, cfg);
    const auto want = brute_force(events, cfg);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].cluster_id == want[i].cluster_id && got[i].members == want[i].members &&
             got[i].base_event_id == want[i].base_event_id && got[i].event_type == want[i].event_type &&
             got[i].sensor_id == want[i].sensor_id;
    }
    c.require(same, "round " + std::to_string(round) + " differs");
  }
  if (c.ok) c.detail = std::to_string(kOracleRounds) + " instances equal";
  return c;
}

Check conservation() {
  Check c;
  std::mt19937_64 rng(0xC0FFEE);
  for (int round = 0; round < kConservationRounds && c.ok; ++round) {
    const auto cfg = testing::random_config(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(1, 400)(rng);
    const auto events = testing::random_events(rng, cfg, n, 3 * cfg.atw_seconds);
    RunOptions opts;
    opts.quality = false;
    opts.keep_clusters = true;
    const auto r = run_pipeline(events, cfg, opts);

    std::multiset<std::string> in, clustered;
    for (const auto& e : events) in.insert(e.event_id);
    for (const auto& rec : r.clusters) {
      for (const auto& m : rec.cluster.members) clustered.insert(m.event_id);
    }
    c.require(in == clustered, "clusters do not partition the input");

    std::int64_t merged = 0;
    std::multiset<std::string> covered;
    for (const auto& o : r.outputs) {
      merged += o.merge_count;
      covered.insert(o.provenance.begin(), o.provenance.end());
    }
    c.require(merged == static_cast<std::int64_t>(events.size() - r.dropped.size()),
              "merge_count sum differs from the filtered input count");
    for (const auto& d : r.dropped) covered.insert(d.event_id);
    c.require(covered == in, "outputs and drops do not cover the input");

    const double v = run_ilr(events, r.outputs, cfg);
    c.require(v >= 0.0 && v <= 1.0, "ILR " + fmt(v));
  }
  for (const char* file : {"port.tree", "ttl.tree", "protocol.tree", "event_id.tree", "file_path.tree",
                           "process_id.tree", "process_name.tree"}) {
    const auto t = ConceptTree::load(testing::data_dir() / "trees" / file);
    c.require(t.information_content(t.root()) == 0.0, std::string("IC(root) of ") + file);
    for (ConceptTree::NodeId id = 0; id < static_cast<ConceptTree::NodeId>(t.size()); ++id) {
      if (id == t.root()) continue;
      c.require(t.information_content(t.generalize(id)) <= t.information_content(id),
                std::string("IC not monotone in ") + file);
    }
  }
  if (c.ok) c.detail = std::to_string(kConservationRounds) + " runs, 7 trees";
  return c;
}

Check monotonicity() {
  Check c;
  const auto t0 = Clock::now();
  const auto cfg = load_config(testing::data_dir() / "scenarios" / "campaign_config.json");
  const auto events = generate(load_scenario(testing::data_dir() / "scenarios" / "campaign.scenario"), cfg);
  c.require(events.size() >= kMonotoneMinEvents, "stream has only " + std::to_string(events.size()) + " events");
  RunOptions opts;
  opts.quality = false;
  opts.ilr = false;

  const std::vector<std::int64_t> grid{30, 60, 300, 3600};
  const auto twl = sweep_twl(events, cfg, grid, opts);
  std::string series;
  for (std::size_t i = 0; i < twl.size(); ++i) {
    series += (i ? " " : "") + fmt(std::round(*twl[i].metrics.ear_percent * 100) / 100);
    if (i) c.require(*twl[i].metrics.ear_percent >= *twl[i - 1].metrics.ear_percent, "EAR falls at " + twl[i].parameter);
  }

  const auto vectors = load_threshold_vectors(testing::data_dir() / "fig7" / "apc_thresholds.txt");
  for (std::size_t i = 1; i < vectors.size(); ++i) {
    for (const auto& [sensor, th] : vectors[i]) {
      const auto& prev = vectors[i - 1].at(sensor);
      for (std::size_t k = 0; k < th.size(); ++k) c.require(th[k] >= prev[k], "threshold file not loosening");
    }
  }
  const auto apc = sweep_thresholds(events, cfg, vectors, opts);
  for (std::size_t i = 1; i < apc.size(); ++i) {
    c.require(apc[i].metrics.aggregated_events >= apc[i - 1].metrics.aggregated_events,
              "output count falls at vector " + std::to_string(i + 1));
  }
  const double secs = seconds_since(t0);
  c.require(secs < kMonotoneSeconds, "took " + fmt(secs) + " s");
  if (c.ok) c.detail = std::to_string(events.size()) + " events, EAR " + series + ", " + fmt(secs) + " s";

  // Same stream under the gamma calibrated on the running example.
  auto strict = cfg;
  strict.gamma_ldcof = testing::fig7_config().gamma_ldcof;
  const auto alt = sweep_twl(events, strict, grid, opts);
  std::cout << "note: EAR by TWL under gamma " << fmt(strict.gamma_ldcof) << ":";
  for (const auto& p : alt) std::cout << " " << fmt(std::round(*p.metrics.ear_percent * 100) / 100);
  std::cout << "\n";
  return c;
}

Check reduction() {
  Check c;
  const auto cfg = with_twl(testing::fig7_config(), 3600);
  const auto spec = load_scenario(testing::data_dir() / "scenarios" / "network_dup.scenario");
  c.require(spec.duplication_factor >= kReductionMinDup, "duplication factor below 50");
  const auto events = generate(spec, cfg);
  for (const auto& e : events) c.require(cfg.sensor(e.sensor_id).detection_level == DetectionLevel::network,
                                         "non-network event in the stream");
  RunOptions opts;
  opts.quality = false;
  opts.ilr = false;
  const auto r = run_pipeline(events, cfg, opts);
  const double e = r.metrics.ear_percent.value_or(0.0);
  c.require(e >= kReductionMinEar, "EAR " + fmt(e));
  if (c.ok) c.detail = std::to_string(events.size()) + " events, EAR " + fmt(e);
  return c;
}

Check throughput() {
  Check c;
  const auto cfg = load_config(testing::data_dir() / "scenarios" / "campaign_config.json");
  auto events = generate(scale(load_scenario(testing::data_dir() / "scenarios" / "campaign.scenario"), 8), cfg);
  c.require(events.size() >= kThroughputMinEvents, "only " + std::to_string(events.size()) + " events");
  const auto n = events.size();
  RunOptions opts;
  opts.quality = false;
  opts.ilr = false;
  const auto r = run_pipeline(std::move(events), cfg, opts);
  const double rate = r.metrics.epr_events_per_sec.value_or(0.0);
  c.require(rate >= kThroughputMinEpr, "EPR " + fmt(rate));
  if (c.ok) c.detail = std::to_string(n) + " events, EPR " + fmt(std::round(rate)) + " events/s";
  return c;
}

Check idempotence() {
  Check c;
  std::mt19937_64 rng(0x1DE);
  for (int round = 0; round < kIdempotenceRounds && c.ok; ++round) {
    const auto cfg = testing::random_config(rng);
    const auto events = testing::random_events(rng, cfg, 200, cfg.atw_seconds);
    const auto outputs = summarize_all(aggregate_window(events, cfg), cfg);

    Summarizer s(cfg);
    c.require(s.summarize_all(std::span<const AggregatedEvent>(outputs)) == outputs, "per-event re-run differs");
    std::map<std::string, std::vector<AggregatedEvent>> by_cluster;
    for (const auto& o : outputs) by_cluster[o.cluster_id].push_back(o);
    for (auto& [id, group] : by_cluster) {
      c.require(s.summarize_group(group) == group, "re-run of cluster " + id + " differs");
    }
  }
  if (c.ok) c.detail = std::to_string(kIdempotenceRounds) + " configurations";
  return c;
}

Check ecg_contrast() {
  Check c;
  std::size_t runs = 0;
  auto one = [&](const std::vector<NormalizedEvent>& events, const PipelineConfig& cfg, const std::string& spec) {
    RunOptions opts;
    opts.quality = false;
    const auto r = run_pipeline(events, cfg, opts);
    if (!r.metrics.ear_percent || !(*r.metrics.ear_percent > 0.0)) return;
    const auto features = parse_edge_spec(spec, cfg);
    const auto raw = build_ecg(events, features);
    const auto agg = build_ecg(r.outputs, features);
    c.require(agg.nodes.size() < raw.nodes.size(), "aggregated graph is not smaller");
    ++runs;
  };
  const auto fig7 = testing::fig7_config();
  one(testing::fig7_events(fig7), fig7, "src_ip,dst_ip,event_name");
  std::mt19937_64 rng(0xECC);
  for (int round = 0; round < 50; ++round) {
    const auto cfg = testing::random_config(rng);
    one(testing::random_events(rng, cfg, 150, cfg.atw_seconds), cfg, "src,dst,sig");
  }
  if (c.ok) c.detail = std::to_string(runs) + " runs with EAR > 0";
  return c;
}

Check determinism() {
  Check c;
  const auto cfg = load_config(testing::data_dir() / "scenarios" / "campaign_config.json");
  const auto spec = load_scenario(testing::data_dir() / "scenarios" / "campaign.scenario");
  auto bytes = [&] {
    const auto r = run_pipeline(generate(spec, cfg), cfg);
    std::ostringstream out;
    for (const auto& p : cfg.sensors) write_aggregated_csv(out, r.outputs, p);
    return out.str();
  };
  const auto a = bytes();
  const auto b = bytes();
  c.require(a == b, "aggregated CSV bytes differ");
  c.require(!a.empty(), "no output");
  if (c.ok) c.detail = std::to_string(a.size()) + " identical bytes";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"running-example golden test", golden},
      {"ILR worked example", ilr_example},
      {"aggregation oracle equivalence", oracle_equivalence},
      {"conservation suite", conservation},
      {"monotonicity in TWL and thresholds", monotonicity},
      {"network reduction at duplication 50", reduction},
      {"throughput budget", throughput},
      {"summarization idempotence", idempotence},
      {"ECG contrast", ecg_contrast},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << c.detail
              << std::endl;
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
