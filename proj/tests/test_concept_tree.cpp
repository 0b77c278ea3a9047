#include <doctest.h>

#include <cmath>
#include <random>

#include "evagg/concept_tree.hpp"
#include "evagg/errors.hpp"
#include "test_support.hpp"

using namespace evagg;

namespace {

ConceptTree tree(const char* file) { return ConceptTree::load(testing::data_dir() / "trees" / file); }

const char* kAllTrees[] = {"port.tree",      "ttl.tree",        "protocol.tree",    "event_id.tree",
                           "file_path.tree", "process_id.tree", "process_name.tree"};

}  // namespace

TEST_CASE("classify maps ports onto range leaves") {
  const auto port = tree("port.tree");
  CHECK(port.label(port.classify(std::int64_t{80})) == "Reserved");
  CHECK(port.label(port.classify(std::int64_t{4444})) == "Deterministic");
  CHECK(port.label(port.classify(std::int64_t{1023})) == "Reserved");
  CHECK(port.label(port.classify(std::int64_t{1024})) == "Deterministic");
  CHECK(port.label(port.classify(std::string("443"))) == "Reserved");
  CHECK_THROWS_AS(port.classify(std::int64_t{70000}), NoMatchingLeaf);
  CHECK_FALSE(port.try_classify(FeatureValue{}));
}

TEST_CASE("classify by exact label, glob and cidr") {
  const auto ev = tree("event_id.tree");
  CHECK(ev.label(ev.classify(std::string("TCP Scan"))) == "TCP Scan");
  CHECK_THROWS_AS(ev.classify(std::string("tcp scan")), NoMatchingLeaf);

  const auto paths = tree("file_path.tree");
  CHECK(paths.label(paths.classify(std::string(R"(C:\Users\bob\Downloads\invoice.pdf)"))) == "Downloads");
  CHECK(paths.label(paths.classify(std::string(R"(C:\Program Files\Adobe\Reader\AcroRd32.exe)"))) == "Programs");
  CHECK(paths.label(paths.classify(std::string(R"(C:\Program Files (x86)\x.exe)"))) == "Programs x86");

  const auto nets = ConceptTree::parse_outline(
      "Address\n  Internal\n    Lab [cidr: 192.168.1.0/24]\n    Office [cidr: 10.0.0.0/8]\n  External [cidr: "
      "172.16.0.0/12]\n");
  CHECK(nets.label(nets.classify(*IpAddress::parse("192.168.1.12"))) == "Lab");
  CHECK(nets.label(nets.classify(*IpAddress::parse("172.25.110.11"))) == "External");
  CHECK(nets.label(nets.classify(std::string("10.9.8.7"))) == "Office");
  CHECK_THROWS_AS(nets.classify(*IpAddress::parse("8.8.8.8")), NoMatchingLeaf);
}

TEST_CASE("generalize examples") {
  const auto ev = tree("event_id.tree");
  CHECK(ev.generalize("Ping Flood") == "ICMP Flood");
  CHECK(ev.generalize("Event ID") == "Event ID");
  CHECK(tree("protocol.tree").generalize("TCP") == "Transport Layer");
  CHECK_THROWS_AS(ev.generalize("No Such Concept"), UnknownConcept);
}

TEST_CASE("lca examples") {
  const auto ev = tree("event_id.tree");
  const std::vector<std::string> floods{"Ping Flood", "Smurf Attack"};
  CHECK(ev.lca(floods) == "ICMP Flood");
  const std::vector<std::string> one{"TCP Scan"};
  CHECK(ev.lca(one) == "TCP Scan");
  const std::vector<std::string> with_root{"TCP Scan", "Event ID"};
  CHECK(ev.lca(with_root) == "Event ID");
  const std::vector<std::string> unknown{"TCP Scan", "Nope"};
  CHECK_THROWS_AS(ev.lca(unknown), UnknownConcept);
}

TEST_CASE("information content on a three level tree matches hand arithmetic") {
  const auto t = ConceptTree::parse_outline("R\n  A\n    a1\n    a2\n  B\n    b1\n    b2\n");
  CHECK(t.max_leaves() == 4);
  CHECK(t.leaves(t.require("A")) == 2);
  CHECK(t.subsumers(t.require("a1")) == 3);
  // root: ((4/1)+1)/5 = 1; internal: ((2/2)+1)/5 = 0.4; leaf: ((1/3)+1)/5 = 4/15
  CHECK(t.information_content("R") == doctest::Approx(0.0));
  for (const char* n : {"A", "B"}) CHECK(t.information_content(n) == doctest::Approx(0.916290731874155));
  for (const char* n : {"a1", "a2", "b1", "b2"}) {
    CHECK(t.information_content(n) == doctest::Approx(1.32175583998232));
    CHECK(t.information_content(n, LogBase::two) == doctest::Approx(1.32175583998232 / std::log(2.0)));
    CHECK(t.information_content(n, LogBase::ten) == doctest::Approx(1.32175583998232 / std::log(10.0)));
  }
  CHECK_THROWS_AS(t.information_content("zz"), UnknownConcept);
}

TEST_CASE("concept measure invariants hold on every bundled tree") {
  for (const char* file : kAllTrees) {
    CAPTURE(file);
    const auto t = tree(file);
    CHECK(t.leaves(t.root()) == t.max_leaves());
    CHECK(t.subsumers(t.root()) == 1);
    for (ConceptTree::NodeId id = 0; id < static_cast<ConceptTree::NodeId>(t.size()); ++id) {
      CHECK(t.leaves(id) >= 1);
      CHECK(t.leaves(id) <= t.max_leaves());
      const double ic = t.information_content(id);
      if (id == t.root()) {
        CHECK(ic == 0.0);
      } else {
        CHECK(ic > 0.0);
        CHECK(t.information_content(*t.parent(id)) <= ic);
      }
      auto walk = id;
      for (int i = 0; i < t.depth(id); ++i) walk = t.generalize(walk);
      CHECK(walk == t.root());
    }
  }
}

TEST_CASE("lca is commutative, associative and idempotent") {
  const auto t = tree("event_id.tree");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<ConceptTree::NodeId> pick(0, static_cast<ConceptTree::NodeId>(t.size()) - 1);
  for (int i = 0; i < 500; ++i) {
    const ConceptTree::NodeId a = pick(rng), b = pick(rng), c = pick(rng);
    const std::vector<ConceptTree::NodeId> ab{a, b}, ba{b, a}, aa{a, a}, abc{a, b, c};
    CHECK(t.lca(ab) == t.lca(ba));
    CHECK(t.lca(aa) == a);
    const std::vector<ConceptTree::NodeId> left{t.lca(ab), c};
    const std::vector<ConceptTree::NodeId> bc{b, c};
    const std::vector<ConceptTree::NodeId> right{a, t.lca(bc)};
    CHECK(t.lca(left) == t.lca(abc));
    CHECK(t.lca(right) == t.lca(abc));
    // The result is an ancestor-or-self of every input.
    for (auto x : abc) {
      auto up = x;
      while (up != t.lca(abc) && up != t.root()) up = t.generalize(up);
      CHECK(up == t.lca(abc));
    }
  }
}

TEST_CASE("outline parse errors") {
  CHECK_THROWS_AS(ConceptTree::parse_outline(""), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n\tA\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\nS\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n  A\n  A\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n  A [0..10]\n  B [10..20]\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n  A [0..10]\n    B\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n  A [cidr: 10.0.0.0/8]\n  B [cidr: 10.1.0.0/16]\n"),
                  ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::parse_outline("R\n  A [5..1]\n"), ConceptTreeError);
  CHECK_THROWS_AS(ConceptTree::load(testing::data_dir() / "trees" / "missing.tree"), IoError);
}

TEST_CASE("ambiguous glob leaves are reported") {
  const auto t = ConceptTree::parse_outline("P\n  A [glob: /tmp/*]\n  B [glob: *.log]\n");
  CHECK(t.label(t.classify(std::string("/tmp/x"))) == "A");
  CHECK_THROWS_AS(t.classify(std::string("/tmp/x.log")), ConceptTreeError);
}
