#include "evagg/concept_tree.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evagg/errors.hpp"

namespace evagg {

std::string_view to_string(LogBase base) {
  switch (base) {
    case LogBase::e:
      return "e";
    case LogBase::two:
      return "2";
    case LogBase::ten:
      return "10";
  }
  return "e";
}

std::optional<LogBase> parse_log_base(std::string_view name) {
  if (name == "e") return LogBase::e;
  if (name == "2") return LogBase::two;
  if (name == "10") return LogBase::ten;
  return std::nullopt;
}

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool cidr_contains(const Cidr& cidr, const IpAddress& ip) {
  if (cidr.network.is_v4() != ip.is_v4()) return false;
  const auto& a = cidr.network.bytes();
  const auto& b = ip.bytes();
  int bits = cidr.prefix;
  for (std::size_t i = 0; bits > 0; ++i, bits -= 8) {
    const int take = bits >= 8 ? 8 : bits;
    const auto mask = static_cast<std::uint8_t>(0xFF << (8 - take));
    if ((a[i] & mask) != (b[i] & mask)) return false;
  }
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

LeafPredicate parse_predicate(std::string_view body, std::size_t line_no) {
  auto fail = [&](const std::string& what) -> ConceptTreeError {
    return ConceptTreeError("line " + std::to_string(line_no) + ": " + what);
  };
  body = trim(body);
  if (body.rfind("glob:", 0) == 0) {
    auto pat = trim(body.substr(5));
    if (pat.empty()) throw fail("empty glob");
    return Glob{std::string(pat)};
  }
  if (body.rfind("cidr:", 0) == 0) {
    auto spec = trim(body.substr(5));
    auto slash = spec.find('/');
    if (slash == std::string_view::npos) throw fail("cidr needs a /prefix");
    auto net = IpAddress::parse(spec.substr(0, slash));
    auto prefix = to_int(spec.substr(slash + 1));
    if (!net || !prefix) throw fail("bad cidr '" + std::string(spec) + "'");
    const int max = net->is_v4() ? 32 : 128;
    if (*prefix < 0 || *prefix > max) throw fail("cidr prefix out of range");
    return Cidr{*net, static_cast<int>(*prefix)};
  }
  auto dots = body.find("..");
  if (dots == std::string_view::npos) throw fail("unknown predicate '" + std::string(body) + "'");
  auto lo = to_int(body.substr(0, dots));
  auto hi = to_int(body.substr(dots + 2));
  if (!lo || !hi) throw fail("bad range '" + std::string(body) + "'");
  if (*lo > *hi) throw fail("range lower bound exceeds upper bound");
  return IntRange{*lo, *hi};
}

double log_in(double x, LogBase base) {
  switch (base) {
    case LogBase::two:
      return std::log2(x);
    case LogBase::ten:
      return std::log10(x);
    case LogBase::e:
      break;
  }
  return std::log(x);
}

bool matches(const LeafPredicate& pred, const FeatureValue& v) {
  if (const auto* r = std::get_if<IntRange>(&pred)) {
    std::optional<std::int64_t> n;
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      n = *i;
    } else if (const auto* s = std::get_if<std::string>(&v)) {
      n = to_int(*s);
    }
    return n && *n >= r->lo && *n <= r->hi;
  }
  if (const auto* c = std::get_if<Cidr>(&pred)) {
    std::optional<IpAddress> ip;
    if (const auto* a = std::get_if<IpAddress>(&v)) {
      ip = *a;
    } else if (const auto* s = std::get_if<std::string>(&v)) {
      ip = IpAddress::parse(*s);
    }
    return ip && cidr_contains(*c, *ip);
  }
  return glob_match(std::get<Glob>(pred).pattern, to_text(v));
}

}  // namespace

ConceptTree::ConceptTree(std::string root_label) {
  if (trim(root_label).empty()) throw ConceptTreeError("empty root label");
  nodes_.push_back(Node{std::move(root_label), -1, {}, {}, 0, 1});
  by_label_.emplace(nodes_[0].label, 0);
}

ConceptTree ConceptTree::parse_outline(std::string_view text) {
  std::optional<ConceptTree> tree;
  std::vector<std::pair<std::size_t, NodeId>> stack;  // (indent, node)
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent < line.size() && line[indent] == '\t') {
      throw ConceptTreeError("line " + std::to_string(line_no) + ": tabs are not allowed in indentation");
    }

    std::optional<LeafPredicate> pred;
    std::string_view label = body;
    if (body.back() == ']') {
      auto open = body.rfind('[');
      if (open == std::string_view::npos) {
        throw ConceptTreeError("line " + std::to_string(line_no) + ": unbalanced ']'");
      }
      pred = parse_predicate(body.substr(open + 1, body.size() - open - 2), line_no);
      label = trim(body.substr(0, open));
    }
    if (label.empty()) throw ConceptTreeError("line " + std::to_string(line_no) + ": empty label");

    if (!tree) {
      if (pred) throw ConceptTreeError("line " + std::to_string(line_no) + ": root cannot carry a predicate");
      tree.emplace(std::string(label));
      stack.emplace_back(indent, 0);
      continue;
    }
    while (!stack.empty() && stack.back().first >= indent) stack.pop_back();
    if (stack.empty()) {
      throw ConceptTreeError("line " + std::to_string(line_no) + ": second root '" + std::string(label) + "'");
    }
    try {
      auto id = tree->add(std::string(label), stack.back().second, std::move(pred));
      stack.emplace_back(indent, id);
    } catch (const ConceptTreeError& e) {
      throw ConceptTreeError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!tree) throw ConceptTreeError("concept tree outline has no nodes");
  return std::move(*tree);
}

ConceptTree ConceptTree::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open concept tree " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_outline(buf.str());
  } catch (const ConceptTreeError& e) {
    throw ConceptTreeError(path.string() + ": " + e.what());
  }
}

ConceptTree::NodeId ConceptTree::add(std::string label, NodeId parent,
                                     std::optional<LeafPredicate> predicate) {
  check_id(parent);
  if (by_label_.count(label)) throw ConceptTreeError("duplicate concept '" + label + "'");
  if (nodes_[parent].predicate) {
    throw ConceptTreeError("'" + nodes_[parent].label + "' has a predicate and cannot have children");
  }
  if (predicate) check_overlap(*predicate);

  const auto id = static_cast<NodeId>(nodes_.size());
  const bool parent_was_leaf = nodes_[parent].children.empty();
  Node node{std::move(label), parent, {}, {}, 0, 1};
  node.depth = nodes_[parent].depth + 1;
  node.predicate = std::move(predicate);
  nodes_.push_back(std::move(node));
  nodes_[parent].children.push_back(id);
  by_label_.emplace(nodes_[id].label, id);
  if (nodes_[id].predicate) predicated_.push_back(id);

  if (!parent_was_leaf) {
    for (NodeId a = parent; a >= 0; a = nodes_[a].parent) ++nodes_[a].leaves;
  }
  return id;
}

void ConceptTree::check_overlap(const LeafPredicate& p) const {
  for (NodeId other : predicated_) {
    const auto& q = *nodes_[other].predicate;
    const auto* a = std::get_if<IntRange>(&p);
    const auto* b = std::get_if<IntRange>(&q);
    if (a && b && a->lo <= b->hi && b->lo <= a->hi) {
      throw ConceptTreeError("range overlaps '" + nodes_[other].label + "'");
    }
    const auto* c = std::get_if<Cidr>(&p);
    const auto* d = std::get_if<Cidr>(&q);
    if (c && d && c->network.is_v4() == d->network.is_v4()) {
      const auto& wider = c->prefix <= d->prefix ? *c : *d;
      const auto& narrower = c->prefix <= d->prefix ? *d : *c;
      if (cidr_contains(wider, narrower.network)) {
        throw ConceptTreeError("cidr overlaps '" + nodes_[other].label + "'");
      }
    }
  }
}

void ConceptTree::check_id(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw UnknownConcept("concept id " + std::to_string(id) + " not in tree " + name());
  }
}

std::optional<ConceptTree::NodeId> ConceptTree::find(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

ConceptTree::NodeId ConceptTree::require(std::string_view label) const {
  auto id = find(label);
  if (!id) throw UnknownConcept("'" + std::string(label) + "' is not a concept of " + name());
  return *id;
}

const std::string& ConceptTree::label(NodeId id) const {
  check_id(id);
  return nodes_[id].label;
}

std::optional<ConceptTree::NodeId> ConceptTree::parent(NodeId id) const {
  check_id(id);
  if (nodes_[id].parent < 0) return std::nullopt;
  return nodes_[id].parent;
}

const std::vector<ConceptTree::NodeId>& ConceptTree::children(NodeId id) const {
  check_id(id);
  return nodes_[id].children;
}

bool ConceptTree::is_leaf(NodeId id) const { return children(id).empty(); }

const std::optional<LeafPredicate>& ConceptTree::predicate(NodeId id) const {
  check_id(id);
  return nodes_[id].predicate;
}

int ConceptTree::depth(NodeId id) const {
  check_id(id);
  return nodes_[id].depth;
}

std::size_t ConceptTree::leaves(NodeId id) const {
  check_id(id);
  return nodes_[id].leaves;
}

std::size_t ConceptTree::subsumers(NodeId id) const { return static_cast<std::size_t>(depth(id)) + 1; }

std::optional<ConceptTree::NodeId> ConceptTree::exact(const FeatureValue& v) const {
  if (is_absent(v)) return std::nullopt;
  return find(to_text(v));
}

std::optional<ConceptTree::NodeId> ConceptTree::try_classify(const FeatureValue& v) const {
  if (is_absent(v)) return std::nullopt;
  if (auto id = exact(v)) return id;
  std::optional<NodeId> hit;
  for (NodeId id : predicated_) {
    if (!matches(*nodes_[id].predicate, v)) continue;
    if (hit) {
      throw ConceptTreeError("value '" + to_text(v) + "' matches both '" + nodes_[*hit].label +
                             "' and '" + nodes_[id].label + "' in " + name());
    }
    hit = id;
  }
  return hit;
}

ConceptTree::NodeId ConceptTree::classify(const FeatureValue& v) const {
  auto id = try_classify(v);
  if (!id) throw NoMatchingLeaf("no leaf of " + name() + " matches '" + to_text(v) + "'");
  return *id;
}

ConceptTree::NodeId ConceptTree::generalize(NodeId id) const {
  check_id(id);
  return nodes_[id].parent < 0 ? id : nodes_[id].parent;
}

std::string ConceptTree::generalize(std::string_view name) const {
  return nodes_[generalize(require(name))].label;
}

ConceptTree::NodeId ConceptTree::lca(std::span<const NodeId> concepts) const {
  if (concepts.empty()) throw ConceptTreeError("lca of an empty concept set");
  NodeId acc = concepts.front();
  check_id(acc);
  for (NodeId c : concepts.subspan(1)) {
    check_id(c);
    NodeId a = acc, b = c;
    while (nodes_[a].depth > nodes_[b].depth) a = nodes_[a].parent;
    while (nodes_[b].depth > nodes_[a].depth) b = nodes_[b].parent;
    while (a != b) {
      a = nodes_[a].parent;
      b = nodes_[b].parent;
    }
    acc = a;
  }
  return acc;
}

std::string ConceptTree::lca(std::span<const std::string> concepts) const {
  std::vector<NodeId> ids;
  ids.reserve(concepts.size());
  for (const auto& c : concepts) ids.push_back(require(c));
  return nodes_[lca(ids)].label;
}

double ConceptTree::information_content(NodeId id, LogBase base) const {
  const double ratio = static_cast<double>(leaves(id)) / static_cast<double>(subsumers(id));
  const double ic = -log_in((ratio + 1.0) / (static_cast<double>(max_leaves()) + 1.0), base);
  return ic <= 0.0 ? 0.0 : ic;
}

double ConceptTree::information_content(std::string_view name, LogBase base) const {
  return information_content(require(name), base);
}

}  // namespace evagg
