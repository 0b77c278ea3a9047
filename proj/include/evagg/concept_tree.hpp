#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "evagg/value.hpp"

namespace evagg {

enum class LogBase { e, two, ten };

std::string_view to_string(LogBase base);
std::optional<LogBase> parse_log_base(std::string_view name);

/// Inclusive integer interval.
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// `*` matches any run of characters, `?` exactly one.
struct Glob {
  std::string pattern;
};

struct Cidr {
  IpAddress network;
  int prefix = 0;
};

using LeafPredicate = std::variant<IntRange, Glob, Cidr>;

bool glob_match(std::string_view pattern, std::string_view text);
bool cidr_contains(const Cidr& cidr, const IpAddress& ip);

/// Generalization hierarchy for one summarizable feature.
///
/// Labels are unique within a tree. Leaves may carry a predicate that maps raw
/// values onto them; a raw value whose canonical text equals a node label is
/// that node directly.
///
/// Outline file format, one concept per line, depth given by indentation:
///
///     # comment
///     Port Number
///       Reserved [0..1023]
///       Deterministic [1024..49151]
///     Path
///       Temp [glob: /tmp/*]
///     Address
///       Internal [cidr: 192.168.0.0/16]
class ConceptTree {
 public:
  using NodeId = std::int32_t;

  explicit ConceptTree(std::string root_label);

  static ConceptTree parse_outline(std::string_view text);
  static ConceptTree load(const std::filesystem::path& path);

  /// Throws ConceptTreeError on duplicate labels, unknown parent, overlapping
  /// integer or CIDR ranges, or a predicate on a node that later gets children.
  NodeId add(std::string label, NodeId parent, std::optional<LeafPredicate> predicate = {});

  NodeId root() const { return 0; }
  const std::string& name() const { return nodes_[0].label; }
  std::size_t size() const { return nodes_.size(); }

  std::optional<NodeId> find(std::string_view label) const;
  NodeId require(std::string_view label) const;  ///< throws UnknownConcept
  const std::string& label(NodeId id) const;
  std::optional<NodeId> parent(NodeId id) const;
  const std::vector<NodeId>& children(NodeId id) const;
  bool is_leaf(NodeId id) const;
  const std::optional<LeafPredicate>& predicate(NodeId id) const;
  int depth(NodeId id) const;

  std::size_t leaves(NodeId id) const;
  /// Ancestors of `id` including itself.
  std::size_t subsumers(NodeId id) const;
  std::size_t max_leaves() const { return leaves(root()); }

  /// Node whose label is the value's canonical text, if any.
  std::optional<NodeId> exact(const FeatureValue& v) const;
  /// Exact label match first, then the unique leaf predicate matching `v`.
  std::optional<NodeId> try_classify(const FeatureValue& v) const;
  NodeId classify(const FeatureValue& v) const;  ///< throws NoMatchingLeaf

  /// Parent, or the root itself.
  NodeId generalize(NodeId id) const;
  std::string generalize(std::string_view label) const;

  NodeId lca(std::span<const NodeId> concepts) const;
  std::string lca(std::span<const std::string> concepts) const;

  /// -log(((leaves(c)/subsumers(c)) + 1) / (maxleaves + 1))
  double information_content(NodeId id, LogBase base = LogBase::e) const;
  double information_content(std::string_view label, LogBase base = LogBase::e) const;

 private:
  struct Node {
    std::string label;
    NodeId parent = -1;
    std::vector<NodeId> children;
    std::optional<LeafPredicate> predicate;
    int depth = 0;
    std::size_t leaves = 1;
  };

  void check_id(NodeId id) const;
  void check_overlap(const LeafPredicate& p) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> by_label_;
  std::vector<NodeId> predicated_;
};

}  // namespace evagg
