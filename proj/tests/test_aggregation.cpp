#include <doctest.h>

#include <random>
#include <set>

#include "evagg/aggregation.hpp"
#include "evagg/errors.hpp"
#include "test_support.hpp"

using namespace evagg;

namespace {

using Membership = std::map<std::string, std::set<std::string>>;

const NormalizedEvent& by_id(const std::vector<NormalizedEvent>& events, const std::string& id) {
  for (const auto& e : events) {
    if (e.event_id == id) return e;
  }
  throw Error("no event " + id);
}

// The forward scan exactly as the pseudocode states it: every unconsumed
// event in time order becomes a base and absorbs each later unconsumed
// similar event closer than the TWL.
std::vector<EventCluster> brute_force(std::vector<NormalizedEvent> events, const PipelineConfig& cfg) {
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

bool same_clusters(const std::vector<EventCluster>& a, const std::vector<EventCluster>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].cluster_id != b[i].cluster_id || a[i].base_event_id != b[i].base_event_id ||
        a[i].event_type != b[i].event_type || a[i].sensor_id != b[i].sensor_id || a[i].members != b[i].members) {
      return false;
    }
  }
  return true;
}

void check_cluster_invariants(const std::vector<EventCluster>& clusters, const std::vector<NormalizedEvent>& input,
                              const PipelineConfig& cfg) {
  std::multiset<std::string> seen;
  for (const auto& c : clusters) {
    REQUIRE_FALSE(c.members.empty());
    const auto& base = c.members.front();
    CHECK(base.event_id == c.base_event_id);
    const auto& p = cfg.sensor(c.sensor_id);
    const auto rules = make_rules(p);
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      const auto& m = c.members[i];
      seen.insert(m.event_id);
      CHECK(m.sensor_id == c.sensor_id);
      CHECK(m.event_type == c.event_type);
      CHECK(check_similarity(base, m, rules));
      CHECK(m.timestamp.epoch_ms - base.timestamp.epoch_ms < p.twl_seconds * 1000);
      if (i) CHECK_FALSE(chronological_less(m, c.members[i - 1]));
    }
  }
  std::multiset<std::string> expected;
  for (const auto& e : input) expected.insert(e.event_id);
  CHECK(seen == expected);
}

}  // namespace

TEST_CASE("make_rules follows the NSFS") {
  const auto cfg = testing::fig7_config();
  const auto rules = make_rules(cfg.sensor("Firewall"));
  REQUIRE(rules.size() == 4);
  CHECK(rules[0].rule_id == "Firewall-R1");
  CHECK(rules[3].feature == "dst_port");
}

TEST_CASE("classify_by_sensor on the running example") {
  const auto cfg = testing::fig7_config();
  auto groups = classify_by_sensor(testing::fig7_events(cfg), cfg);
  auto ids = [&](const std::string& s) {
    std::vector<std::string> out;
    for (const auto& e : groups.at(s)) out.push_back(e.event_id);
    return out;
  };
  CHECK(ids("NIDS") == std::vector<std::string>{"e1", "e3", "e5", "e6", "e9"});
  CHECK(ids("Firewall") == std::vector<std::string>{"e2", "e4", "e7", "e8"});
  CHECK(ids("HostOS") == std::vector<std::string>{"e10", "e11", "e12"});

  CHECK(classify_by_sensor({}, cfg).empty());

  auto stray = testing::fig7_events(cfg);
  stray[0].sensor_id = "Proxy";
  CHECK_THROWS_AS(classify_by_sensor(stray, cfg), ConfigMissingSensor);
}

TEST_CASE("check_similarity examples") {
  const auto cfg = testing::fig7_config();
  const auto events = testing::fig7_events(cfg);
  const auto rules = make_rules(cfg.sensor("NIDS"));
  CHECK(check_similarity(by_id(events, "e1"), by_id(events, "e3"), rules));
  CHECK_FALSE(check_similarity(by_id(events, "e6"), by_id(events, "e1"), rules));
  CHECK(check_similarity(by_id(events, "e6"), by_id(events, "e6"), rules));

  auto a = by_id(events, "e1"), b = by_id(events, "e3");
  a.set_feature("dst_ip", FeatureValue{});
  CHECK_FALSE(check_similarity(a, b, rules));
  b.set_feature("dst_ip", FeatureValue{});
  CHECK(check_similarity(a, b, rules));
  b.event_type = "Other";
  CHECK_FALSE(check_similarity(a, b, rules));
}

TEST_CASE("aggregate_window reproduces the running example clusters") {
  for (const char* file : {"config.json", "config_twl300.json"}) {
    CAPTURE(file);
    const auto cfg = load_config(testing::data_dir() / "fig7" / file);
    const auto events = testing::fig7_events(cfg);
    const auto clusters = aggregate_window(events, cfg);
    const Membership expected{{"C0", {"e1", "e3", "e5"}}, {"C1", {"e6", "e9"}}, {"C2", {"e2", "e4"}},
                              {"C3", {"e7"}},             {"C4", {"e8"}},       {"C5", {"e10"}},
                              {"C6", {"e11", "e12"}}};
    CHECK(testing::memberships(clusters) == expected);
    check_cluster_invariants(clusters, events, cfg);
  }
}

TEST_CASE("aggregate_window trivial cases") {
  const auto cfg = testing::fig7_config();
  const auto events = testing::fig7_events(cfg);
  CHECK(aggregate_window({}, cfg).empty());

  auto one = aggregate_window({events[0]}, cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0].members.size() == 1);

  std::vector<NormalizedEvent> distinct;
  for (int i = 0; i < 20; ++i) {
    auto e = events[0];
    e.event_id = "d" + std::to_string(i);
    e.set_feature("dst_ip", IpAddress::v4(0x0A000000u + static_cast<std::uint32_t>(i)));
    distinct.push_back(e);
  }
  CHECK(aggregate_window(distinct, cfg).size() == 20);

  auto stray = events;
  stray[3].sensor_id = "Proxy";
  CHECK_THROWS_AS(aggregate_window(stray, cfg), ConfigMissingSensor);
}

TEST_CASE("aggregate_window equals the brute-force loop with TWL at least the ATW") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 40; ++round) {
    auto cfg = testing::random_config(rng);
    for (auto& s : cfg.sensors) s.twl_seconds = cfg.atw_seconds;
    const auto events = testing::random_events(rng, cfg, 50, cfg.atw_seconds);
    CHECK(same_clusters(aggregate_window(events, cfg), brute_force(events, cfg)));
  }
}

TEST_CASE("aggregate_window equals the brute-force loop for random TWLs") {
  std::mt19937_64 rng(202);
  for (int round = 0; round < 100; ++round) {
    const auto cfg = testing::random_config(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(0, 100)(rng);
    const auto events = testing::random_events(rng, cfg, n, cfg.atw_seconds);
    const auto clusters = aggregate_window(events, cfg);
    CHECK(same_clusters(clusters, brute_force(events, cfg)));
    check_cluster_invariants(clusters, events, cfg);
    CHECK(same_clusters(clusters, aggregate_window(events, cfg)));
  }
}

TEST_CASE("cluster count is non-increasing in TWL") {
  std::mt19937_64 rng(303);
  for (int round = 0; round < 30; ++round) {
    auto cfg = testing::random_config(rng);
    const auto events = testing::random_events(rng, cfg, 80, cfg.atw_seconds);
    std::size_t previous = SIZE_MAX;
    for (std::int64_t twl : {1, 5, 15, 30, 60}) {
      for (auto& s : cfg.sensors) s.twl_seconds = twl;
      const auto count = aggregate_window(events, cfg).size();
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("split_windows is tumbling and aligned to the first event") {
  const auto cfg = testing::fig7_config();
  auto events = testing::fig7_events(cfg);
  CHECK(split_windows({}, 60).empty());
  auto one = split_windows(events, 120);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 12);

  std::reverse(events.begin(), events.end());
  auto w = split_windows(events, 30);
  // [0,30) [30,60) [60,90) [90,120)
  REQUIRE(w.size() == 4);
  CHECK(w[0].size() == 5);
  CHECK(w[1].size() == 3);
  CHECK(w[2].size() == 3);
  CHECK(w[3].size() == 1);
  CHECK(w[0].front().event_id == "e1");
  for (const auto& win : w) CHECK(std::is_sorted(win.begin(), win.end(), chronological_less));

  std::vector<NormalizedEvent> gap{events.back(), events.back()};
  gap[1].event_id = "late";
  gap[1].timestamp.epoch_ms += 3600 * 1000;
  CHECK(split_windows(gap, 60).size() == 2);
}

TEST_CASE("cluster ids continue across windows") {
  const auto cfg = testing::fig7_config();
  const auto events = testing::fig7_events(cfg);
  ClusterIdGenerator ids;
  auto a = aggregate_window(events, cfg, ids);
  auto b = aggregate_window(events, cfg, ids);
  CHECK(a.back().cluster_id == "C6");
  CHECK(b.front().cluster_id == "C7");
  CHECK(ids.issued() == 14);
}
