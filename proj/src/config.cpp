#include "evagg/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evagg/errors.hpp"

namespace evagg {

using nlohmann::json;

std::string_view to_string(FilterMode mode) {
  return mode == FilterMode::strict_sc ? "strict-sc" : "ldcof";
}

std::optional<FilterMode> parse_filter_mode(std::string_view name) {
  if (name == "ldcof") return FilterMode::ldcof;
  if (name == "strict-sc" || name == "strict_sc") return FilterMode::strict_sc;
  return std::nullopt;
}

const SensorProfile* PipelineConfig::find_sensor(std::string_view sensor_id) const {
  for (const auto& s : sensors) {
    if (s.sensor_id == sensor_id) return &s;
  }
  return nullptr;
}

const SensorProfile& PipelineConfig::sensor(std::string_view sensor_id) const {
  if (const auto* s = find_sensor(sensor_id)) return *s;
  throw ConfigMissingSensor("no sensor profile for '" + std::string(sensor_id) + "'");
}

SensorProfile& PipelineConfig::sensor(std::string_view sensor_id) {
  return const_cast<SensorProfile&>(std::as_const(*this).sensor(sensor_id));
}

const ConceptTree& PipelineConfig::tree(std::string_view feature) const {
  auto it = concept_trees.find(std::string(feature));
  if (it == concept_trees.end() || !it->second) {
    throw ConfigError("no concept tree for feature '" + std::string(feature) + "'");
  }
  return *it->second;
}

std::vector<std::string> PipelineConfig::check() const {
  std::vector<std::string> problems;
  if (atw_seconds < 1) problems.push_back("atw_seconds must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) problems.push_back("alpha must be in (0,1]");
  if (!(beta >= 1.0)) problems.push_back("beta must be >= 1");
  if (!(gamma_ldcof > 0.0)) problems.push_back("gamma_ldcof must be positive");
  if (!(delta_discard > 0.0 && delta_discard <= 1.0)) problems.push_back("delta_discard must be in (0,1]");
  if (quality_max_points == 1) problems.push_back("quality_max_points must be 0 or at least 2");

  std::set<std::string> ids;
  for (const auto& s : sensors) {
    if (!ids.insert(s.sensor_id).second) problems.push_back("duplicate sensor " + s.sensor_id);
    for (auto& p : s.check()) problems.push_back(std::move(p));
    for (const auto& f : s.sfs) {
      if (!concept_trees.count(f)) problems.push_back(s.sensor_id + ": SFS feature " + f + " has no concept tree");
    }
    if (s.twl_seconds > atw_seconds) {
      problems.push_back(s.sensor_id + ": twl_seconds " + std::to_string(s.twl_seconds) +
                         " exceeds atw_seconds " + std::to_string(atw_seconds));
    }
  }
  std::set<std::string> pattern_ids;
  for (const auto& p : patterns) {
    if (!pattern_ids.insert(p.pattern_id).second) problems.push_back("duplicate pattern " + p.pattern_id);
    if (!find_sensor(p.sensor_id)) {
      problems.push_back("pattern " + p.pattern_id + " names unknown sensor " + p.sensor_id);
    }
  }
  return problems;
}

void PipelineConfig::validate() const {
  auto problems = check();
  if (problems.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing '" + key + "'");
  return *it;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<T>();
}

SensorProfile parse_sensor(const json& j) {
  if (!j.is_object()) throw ConfigError("sensor entries must be objects");
  SensorProfile p;
  p.sensor_id = require(j, "sensor_id", "sensor").get<std::string>();
  const std::string where = "sensor " + p.sensor_id;
  reject_unknown_keys(j, {"sensor_id", "detection_level", "features", "nsfs", "sfs", "sf_thresholds",
                          "twl_seconds", "pattern", "comment"},
                      where);
  auto level = get_or<std::string>(j, "detection_level", "Network");
  auto parsed_level = parse_detection_level(level);
  if (!parsed_level) throw ConfigError(where + ": unknown detection_level '" + level + "'");
  p.detection_level = *parsed_level;

  std::vector<FeatureSpec> specs;
  for (const auto& f : require(j, "features", where)) {
    FeatureSpec spec;
    if (f.is_string()) {
      spec.name = f.get<std::string>();
    } else {
      spec.name = require(f, "name", where).get<std::string>();
      auto kind = get_or<std::string>(f, "kind", "text");
      auto parsed = parse_feature_kind(kind);
      if (!parsed) throw ConfigError(where + ": feature " + spec.name + " has unknown kind '" + kind + "'");
      spec.kind = *parsed;
    }
    specs.push_back(std::move(spec));
  }
  p.schema = make_schema(std::move(specs));
  p.nsfs = get_or<std::vector<std::string>>(j, "nsfs", {});
  p.sfs = get_or<std::vector<std::string>>(j, "sfs", {});
  p.sf_thresholds = get_or<std::vector<int>>(j, "sf_thresholds", std::vector<int>(p.sfs.size(), 1));
  p.twl_seconds = get_or<std::int64_t>(j, "twl_seconds", 60);
  p.pattern = get_or<std::string>(j, "pattern", "");
  return p;
}

ExtractionPattern parse_pattern(const json& j) {
  ExtractionPattern p;
  p.pattern_id = require(j, "pattern_id", "pattern").get<std::string>();
  const std::string where = "pattern " + p.pattern_id;
  reject_unknown_keys(j, {"pattern_id", "sensor_id", "regex", "field_map", "timestamp_format",
                          "default_year", "comment"},
                      where);
  p.sensor_id = require(j, "sensor_id", where).get<std::string>();
  p.regex = require(j, "regex", where).get<std::string>();
  p.field_map = get_or<std::map<std::string, std::string>>(j, "field_map", {});
  p.timestamp_format = get_or<std::string>(j, "timestamp_format", "");
  p.default_year = get_or<int>(j, "default_year", 1970);
  return p;
}

PipelineConfig parse_json(const json& root, const std::filesystem::path& base_dir) {
  if (!root.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(root, {"atw_seconds", "alpha", "beta", "gamma_ldcof", "delta_discard", "log_base",
                             "filter_mode", "quality_max_points", "sensors", "concept_trees",
                             "patterns", "comment"},
                      "config");
  PipelineConfig cfg;
  cfg.atw_seconds = get_or<std::int64_t>(root, "atw_seconds", cfg.atw_seconds);
  cfg.alpha = get_or<double>(root, "alpha", cfg.alpha);
  cfg.beta = get_or<double>(root, "beta", cfg.beta);
  cfg.gamma_ldcof = get_or<double>(root, "gamma_ldcof", cfg.gamma_ldcof);
  cfg.delta_discard = get_or<double>(root, "delta_discard", cfg.delta_discard);
  cfg.quality_max_points = get_or<std::size_t>(root, "quality_max_points", cfg.quality_max_points);

  auto base = get_or<std::string>(root, "log_base", "e");
  auto parsed_base = parse_log_base(base);
  if (!parsed_base) throw ConfigError("log_base must be one of e, 2, 10; got '" + base + "'");
  cfg.log_base = *parsed_base;

  auto mode = get_or<std::string>(root, "filter_mode", "ldcof");
  auto parsed_mode = parse_filter_mode(mode);
  if (!parsed_mode) throw ConfigError("filter_mode must be ldcof or strict-sc; got '" + mode + "'");
  cfg.filter_mode = *parsed_mode;

  for (const auto& s : require(root, "sensors", "config")) cfg.sensors.push_back(parse_sensor(s));
  if (auto it = root.find("patterns"); it != root.end()) {
    for (const auto& p : *it) cfg.patterns.push_back(parse_pattern(p));
  }

  std::map<std::filesystem::path, std::shared_ptr<const ConceptTree>> by_path;
  if (auto it = root.find("concept_trees"); it != root.end()) {
    for (const auto& [feature, ref] : it->items()) {
      if (ref.is_object()) {
        auto outline = require(ref, "outline", "concept tree " + feature).get<std::string>();
        try {
          cfg.concept_trees[feature] = std::make_shared<const ConceptTree>(ConceptTree::parse_outline(outline));
        } catch (const ConceptTreeError& e) {
          throw ConfigError("concept tree " + feature + ": " + e.what());
        }
        continue;
      }
      std::filesystem::path path = ref.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      path = path.lexically_normal();
      auto& slot = by_path[path];
      if (!slot) {
        try {
          slot = std::make_shared<const ConceptTree>(ConceptTree::load(path));
        } catch (const Error& e) {
          throw ConfigError(e.what());
        }
      }
      cfg.concept_trees[feature] = slot;
    }
  }
  return cfg;
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  try {
    auto root = json::parse(text, nullptr, true, true);
    cfg = parse_json(root, base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace evagg
