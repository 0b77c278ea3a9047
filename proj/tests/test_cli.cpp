#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFig7 = testing::data_dir() / "fig7";

struct Scratch {
  fs::path dir;

  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("evagg_cli_" + std::to_string(::getpid()) + "_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + AGGREGATE_BIN + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t aggregated_rows(const fs::path& dir) {
  std::size_t n = 0;
  for (const char* s : {"NIDS", "Firewall", "HostOS"}) {
    const auto f = dir / ("aggregated_" + std::string(s) + ".csv");
    REQUIRE(fs::exists(f));
    n += lines(f).size() - 1;
  }
  return n;
}

std::size_t count_substr(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("run on the running-example logs") {
  Scratch s("logs");
  const auto out = s.dir / "out";
  const int code = run("run --config " + q(kFig7 / "config.json") + " --input " + q(kFig7 / "logs") + " --out " +
                           q(out) + " --audit --dump-clusters --export-ecg src_ip,dst_ip,event_name",
                       s.dir / "log.txt");
  INFO(slurp(s.dir / "log.txt"));
  REQUIRE(code == 0);
  CHECK(aggregated_rows(out) == 6);

  const auto m = nlohmann::json::parse(slurp(out / "metrics.json"));
  CHECK(m["total_events"] == 12);
  CHECK(m["aggregated_events"] == 6);
  CHECK(m["ear_percent"].get<double>() == 50.0);
  CHECK(m["clusters"] == 7);
  CHECK(lines(out / "metrics.csv").size() == 2);

  const auto audit = lines(out / "audit.csv");
  REQUIRE(audit.size() == 3);
  CHECK(audit[0] == "event_id,cluster_id,score,reason");
  CHECK(lines(out / "clusters.jsonl").size() == 7);

  const auto raw = slurp(out / "ecg_raw.dot");
  const auto agg = slurp(out / "ecg_aggregated.dot");
  CHECK(count_substr(raw, "[label=") == 12);
  CHECK(count_substr(agg, "[label=") == 6);
  CHECK(count_substr(agg, " -- ") <= 15);
  CHECK(slurp(s.dir / "log.txt").find("EAR: 50%") != std::string::npos);
}

TEST_CASE("run on the scenario matches the log run and is deterministic") {
  Scratch s("scenario");
  const std::string base = "run --config " + q(kFig7 / "config.json") + " --scenario " + q(kFig7 / "fig7.scenario");
  REQUIRE(run(base + " --out " + q(s.dir / "a"), s.dir / "a.txt") == 0);
  REQUIRE(run(base + " --out " + q(s.dir / "b"), s.dir / "b.txt") == 0);
  CHECK(aggregated_rows(s.dir / "a") == 6);
  for (const char* f : {"aggregated_NIDS.csv", "aggregated_Firewall.csv", "aggregated_HostOS.csv"}) {
    CHECK(slurp(s.dir / "a" / f) == slurp(s.dir / "b" / f));
  }
  const auto nids = lines(s.dir / "a" / "aggregated_NIDS.csv");
  REQUIRE(nids.size() == 4);
  CHECK(nids[1].find("e1;e3") != std::string::npos);
  CHECK(nids[1].find("Port Number") != std::string::npos);
}

TEST_CASE("generated OLF CSV feeds back into run") {
  Scratch s("generate");
  REQUIRE(run("generate --config " + q(kFig7 / "config.json") + " --scenario " + q(kFig7 / "fig7.scenario") +
                  " --out " + q(s.dir / "olf"),
              s.dir / "g.txt") == 0);
  CHECK(lines(s.dir / "olf" / "events_NIDS.csv").size() == 6);
  REQUIRE(run("run --config " + q(kFig7 / "config.json") + " --input " + q(s.dir / "olf") + " --out " +
                  q(s.dir / "out"),
              s.dir / "r.txt") == 0);
  CHECK(aggregated_rows(s.dir / "out") == 6);

  REQUIRE(run("normalize --config " + q(kFig7 / "config.json") + " --input " + q(kFig7 / "logs") + " --out " +
                  q(s.dir / "norm"),
              s.dir / "n.txt") == 0);
  CHECK(lines(s.dir / "norm" / "olf_Firewall.csv").size() == 5);
}

TEST_CASE("exit codes") {
  Scratch s("codes");
  const auto log = s.dir / "log.txt";
  const std::string cfg = " --config " + q(kFig7 / "config.json");

  CHECK(run("run --config " + q(s.dir / "missing.json") + " --input " + q(kFig7 / "logs") + " --out " + q(s.dir),
            log) == 2);
  CHECK(slurp(log).find("error") != std::string::npos);
  CHECK(run("run" + cfg + " --input " + q(kFig7 / "logs"), log) == 2);
  CHECK(run("run" + cfg + " --input " + q(kFig7 / "logs") + " --out " + q(s.dir) + " --bogus", log) == 2);
  CHECK(run("run" + cfg + " --input " + q(kFig7 / "logs") + " --out " + q(s.dir) + " --filter-mode x", log) == 2);
  CHECK(run("run" + cfg + " --input " + q(s.dir / "nope") + " --out " + q(s.dir / "o"), log) == 3);
  CHECK(run("run" + cfg + " --out " + q(s.dir / "o"), log) == 2);
  CHECK(run("run" + cfg + " --input " + q(kFig7 / "logs") + " --out " + q(s.dir / "o") + " --export-ecg nope",
            log) == 2);

  std::ofstream(s.dir / "bad.csv") << "a,b,c\n1,2,3\n";
  CHECK(run("run" + cfg + " --input " + q(s.dir / "bad.csv") + " --out " + q(s.dir / "o"), log) == 3);

  fs::create_directories(s.dir / "empty");
  REQUIRE(run("run" + cfg + " --input " + q(s.dir / "empty") + " --out " + q(s.dir / "e"), log) == 0);
  const auto m = nlohmann::json::parse(slurp(s.dir / "e" / "metrics.json"));
  CHECK(m["ear_percent"].is_null());
  CHECK(m["total_events"] == 0);
  CHECK(aggregated_rows(s.dir / "e") == 0);
}

TEST_CASE("strict-sc mode from the command line") {
  Scratch s("strict");
  REQUIRE(run("run --config " + q(kFig7 / "config.json") + " --scenario " + q(kFig7 / "fig7.scenario") +
                  " --filter-mode strict-sc --out " + q(s.dir / "o"),
              s.dir / "log.txt") == 0);
  const auto m = nlohmann::json::parse(slurp(s.dir / "o" / "metrics.json"));
  CHECK(m["dropped_events"] == 3);
}

TEST_CASE("sweeps") {
  Scratch s("sweep");
  const std::string base = "sweep --config " + q(kFig7 / "config.json") + " --scenario " + q(kFig7 / "fig7.scenario");

  REQUIRE(run(base + " --sweep-twl 5,30,60,300 --out " + q(s.dir / "twl"), s.dir / "t.txt") == 0);
  const auto twl = lines(s.dir / "twl" / "sweep_twl.csv");
  REQUIRE(twl.size() == 5);
  CHECK(twl[0] == "parameter,total_events,aggregated_events,ear_percent,epr_events_per_sec,ilr,storage_bytes");
  double previous = -1.0;
  for (std::size_t i = 1; i < twl.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream row(twl[i]);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    const double ear = std::stod(cells[3]);
    CHECK(ear >= previous);
    previous = ear;
    CHECK(std::stoul(cells[6]) > 0);
  }

  REQUIRE(run(base + " --sweep-thresholds " + q(kFig7 / "apc_thresholds.txt") + " --out " + q(s.dir / "apc"),
              s.dir / "a.txt") == 0);
  CHECK(lines(s.dir / "apc" / "apc.csv").size() == 9);

  // A single grid point equal to the config reproduces the plain run.
  std::ofstream(s.dir / "one.txt") << "NIDS 1,1,2,1,1; Firewall 2,1,1; HostOS 2,3,3\n";
  REQUIRE(run(base + " --sweep-thresholds " + q(s.dir / "one.txt") + " --out " + q(s.dir / "one"),
              s.dir / "o.txt") == 0);
  const auto one = lines(s.dir / "one" / "apc.csv");
  REQUIRE(one.size() == 2);
  CHECK(one[1].find(",12,6,50,") != std::string::npos);

  CHECK(run(base + " --out " + q(s.dir / "x"), s.dir / "x.txt") == 2);
  CHECK(run(base + " --sweep-twl 0 --out " + q(s.dir / "x"), s.dir / "x.txt") == 2);
}
