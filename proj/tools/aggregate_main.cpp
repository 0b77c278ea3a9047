#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evagg/config.hpp"
#include "evagg/ecg.hpp"
#include "evagg/errors.hpp"
#include "evagg/ingest.hpp"
#include "evagg/olf_csv.hpp"
#include "evagg/pipeline.hpp"
#include "evagg/report.hpp"
#include "evagg/scenario.hpp"
#include "evagg/sweep.hpp"

namespace fs = std::filesystem;
using namespace evagg;

namespace {

struct Options {
  std::string config;
  std::vector<std::string> inputs;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::int64_t scale = 1;
  std::string out;
  std::optional<std::int64_t> atw;
  std::string filter_mode;
  bool audit = false;
  bool dump_clusters = false;
  std::string export_ecg;
  std::string sweep_twl;
  std::string sweep_thresholds;
  bool no_quality = false;
};

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

PipelineConfig load(const Options& o) {
  auto cfg = load_config(o.config);
  if (o.atw) cfg.atw_seconds = *o.atw;
  if (!o.filter_mode.empty()) {
    auto mode = parse_filter_mode(o.filter_mode);
    if (!mode) throw UsageError("--filter-mode must be ldcof or strict-sc");
    cfg.filter_mode = *mode;
  }
  cfg.validate();
  return cfg;
}

std::vector<NormalizedEvent> load_events(const Options& o, const PipelineConfig& cfg) {
  if (!o.scenario.empty() && !o.inputs.empty()) throw UsageError("give either --input or --scenario, not both");
  if (!o.scenario.empty()) {
    auto spec = load_scenario(o.scenario);
    if (o.seed) spec.seed = *o.seed;
    if (o.scale != 1) spec = scale(std::move(spec), o.scale);
    return generate(spec, cfg);
  }
  if (o.inputs.empty()) throw UsageError("one of --input or --scenario is required");
  std::vector<fs::path> paths(o.inputs.begin(), o.inputs.end());
  auto loaded = load_inputs(paths, cfg);
  if (loaded.rejects.count > 0) {
    std::cerr << "rejected " << loaded.rejects.count << " of " << loaded.total_lines << " lines\n";
    for (const auto& r : loaded.rejects.samples) {
      std::cerr << "  line " << r.line_no << ": " << r.reason << "\n";
    }
  }
  return std::move(loaded.events);
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void export_graphs(const fs::path& dir, const std::string& spec, const PipelineConfig& cfg,
                   const std::vector<NormalizedEvent>& raw, const std::vector<AggregatedEvent>& aggregated) {
  const auto features = parse_edge_spec(spec, cfg);
  const auto g_raw = build_ecg(raw, features);
  const auto g_agg = build_ecg(aggregated, features);
  std::ofstream a(dir / "ecg_raw.dot", std::ios::binary), b(dir / "ecg_aggregated.dot", std::ios::binary);
  if (!a || !b) throw IoError("cannot write graph files in " + dir.string());
  write_dot(a, g_raw, "ecg_raw");
  write_dot(b, g_agg, "ecg_aggregated");
  std::cout << "ecg raw: " << g_raw.nodes.size() << " nodes, " << g_raw.edges.size() << " edges\n"
            << "ecg aggregated: " << g_agg.nodes.size() << " nodes, " << g_agg.edges.size() << " edges\n";
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  auto events = load_events(o, cfg);
  const auto dir = out_dir(o);

  std::vector<NormalizedEvent> raw;
  if (!o.export_ecg.empty()) {
    parse_edge_spec(o.export_ecg, cfg);
    raw = events;
  }
  RunOptions ro;
  ro.quality = !o.no_quality;
  ro.keep_clusters = o.dump_clusters;
  auto result = run_pipeline(std::move(events), cfg, ro);

  write_aggregated_outputs(dir, result.outputs, cfg);
  write_text_file(dir / "metrics.json", metrics_json(result.metrics));
  write_text_file(dir / "metrics.csv",
                  csv_line(metrics_csv_header()) + "\n" + csv_line(metrics_csv_cells(result.metrics)) + "\n");
  if (o.audit) {
    std::ofstream a(dir / "audit.csv", std::ios::binary);
    if (!a) throw IoError("cannot write audit.csv");
    write_audit_csv(a, result.dropped);
  }
  if (o.dump_clusters) {
    std::ofstream c(dir / "clusters.jsonl", std::ios::binary);
    if (!c) throw IoError("cannot write clusters.jsonl");
    write_clusters_jsonl(c, result.clusters);
  }

  const auto& m = result.metrics;
  std::cout << "events: " << m.total_events << "\n"
            << "clusters: " << m.clusters << "\n"
            << "dropped: " << m.dropped_events << "\n"
            << "aggregated: " << m.aggregated_events << "\n"
            << "EAR: " << (m.ear_percent ? format_number(*m.ear_percent) + "%" : std::string("n/a")) << "\n"
            << "ILR: " << format_number(m.ilr) << "\n"
            << "EPR: " << (m.epr_events_per_sec ? format_number(*m.epr_events_per_sec) : std::string("n/a"))
            << " events/s\n";
  if (result.diagnostics.unclassified > 0) {
    std::cerr << result.diagnostics.unclassified << " values matched no concept and were kept literal\n";
  }
  if (!o.export_ecg.empty()) export_graphs(dir, o.export_ecg, cfg, raw, result.outputs);
  return 0;
}

int cmd_sweep(const Options& o) {
  if (o.sweep_twl.empty() == o.sweep_thresholds.empty()) {
    throw UsageError("sweep needs exactly one of --sweep-twl or --sweep-thresholds");
  }
  const auto cfg = load(o);
  const auto events = load_events(o, cfg);
  const auto dir = out_dir(o);
  RunOptions ro;
  ro.quality = false;
  std::vector<SweepPoint> points;
  fs::path file;
  if (!o.sweep_twl.empty()) {
    const auto grid = parse_twl_grid(o.sweep_twl);
    points = sweep_twl(events, cfg, grid, ro);
    file = dir / "sweep_twl.csv";
  } else {
    const auto vectors = load_threshold_vectors(o.sweep_thresholds);
    points = sweep_thresholds(events, cfg, vectors, ro);
    file = dir / "apc.csv";
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  write_sweep_csv(out, points);
  write_sweep_csv(std::cout, points);
  return 0;
}

void write_per_sensor(const fs::path& dir, const std::string& prefix, const std::vector<NormalizedEvent>& events,
                      const PipelineConfig& cfg) {
  for (const auto& s : cfg.sensors) {
    std::vector<NormalizedEvent> mine;
    for (const auto& e : events) {
      if (e.sensor_id == s.sensor_id) mine.push_back(e);
    }
    write_olf_csv(dir / (prefix + s.sensor_id + ".csv"), mine, s);
    std::cout << s.sensor_id << ": " << mine.size() << " events\n";
  }
}

int cmd_generate(const Options& o) {
  if (o.scenario.empty()) throw UsageError("generate needs --scenario");
  const auto cfg = load(o);
  const auto events = load_events(o, cfg);
  write_per_sensor(out_dir(o), "events_", events, cfg);
  return 0;
}

int cmd_normalize(const Options& o) {
  if (o.inputs.empty()) throw UsageError("normalize needs --input");
  const auto cfg = load(o);
  auto events = load_events(o, cfg);
  write_per_sensor(out_dir(o), "olf_", events, cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous security event aggregation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool pipeline) {
    sub->add_option("--config", o.config, "pipeline config (JSON)")->required();
    sub->add_option("--input", o.inputs, "log files, directories or OLF CSV files");
    sub->add_option("--scenario", o.scenario, "synthetic scenario spec instead of --input");
    sub->add_option("--seed", o.seed, "override the scenario seed");
    sub->add_option("--scale", o.scale, "multiply scenario counts")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--atw", o.atw, "aggregation time window in seconds")->check(CLI::PositiveNumber);
    if (pipeline) {
      sub->add_option("--filter-mode", o.filter_mode, "ldcof or strict-sc");
      sub->add_flag("--no-quality", o.no_quality, "skip the Dunn and Davies-Bouldin indices");
    }
  };

  auto* run = app.add_subcommand("run", "aggregate, filter and summarize events");
  common(run, true);
  run->add_flag("--audit", o.audit, "write audit.csv with every dropped event");
  run->add_flag("--dump-clusters", o.dump_clusters, "write clusters.jsonl");
  run->add_option("--export-ecg", o.export_ecg, "comma-separated features linking events in the ECG");

  auto* sweep = app.add_subcommand("sweep", "run the pipeline over a parameter grid");
  common(sweep, true);
  sweep->add_option("--sweep-twl", o.sweep_twl, "comma-separated TWL values in seconds");
  sweep->add_option("--sweep-thresholds", o.sweep_thresholds, "file of SFS threshold vectors");

  auto* gen = app.add_subcommand("generate", "write a synthetic scenario as OLF CSV");
  common(gen, false);

  auto* norm = app.add_subcommand("normalize", "convert raw logs to OLF CSV");
  common(norm, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*gen) return cmd_generate(o);
    if (*norm) return cmd_normalize(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
