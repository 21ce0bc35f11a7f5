#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "proplab/errors.hpp"
#include "proplab/experiments.hpp"
#include "proplab/report.hpp"

using namespace proplab;
namespace fs = std::filesystem;

namespace {

const char* cli() {
  const char* p = std::getenv("PROPLAB_CLI");
  return p ? p : "./proplab";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("proplab_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(cli()) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("csv quoting and number format") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  Table t{{"name", "x"}, {{std::string("a,b"), 1.5}, {std::string("c"), std::int64_t(3)}}};
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == "name,x\r\n\"a,b\",1.5\r\nc,3\r\n");
}

TEST_CASE("strict config parsing") {
  using nlohmann::json;
  const auto c = config_from_json(json{{"command", "check"}, {"model", "sphere"}, {"hbar", 0.25}, {"seed", 5}});
  CHECK(c.model == ModelName::Sphere);
  CHECK(c.hbar == 0.25);
  CHECK(c.seed == 5u);
  CHECK_THROWS_AS(config_from_json(json{{"modle", "sphere"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"hbar", "big"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"hbar", -1.0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"command", "dance"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"tolerances", {{"idempotency", 1e-3}, {"extra", 1}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"truncation", {{"p_min", 0}}}}), ConfigError);
  const auto t = config_from_json(json{{"tolerances", {{"idempotency", 1e-3}}}});
  CHECK(*t.tolerances.idempotency == 1e-3);
  // the echo parses back to the same config
  const auto back = config_from_json(config_to_json(c));
  CHECK(back.hbar == c.hbar);
  CHECK(back.model == c.model);
  CHECK(back.grid_n == default_grid_n("check", ModelName::Sphere));
}

TEST_CASE("exit status 0 on success with both reports written") {
  const auto dir = scratch("ok");
  CHECK(run("check --model sphere --hbar 0.5 --grid-n 64 --output-dir " + dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["passed"] == true);
  CHECK(j["assertions"].size() == 4u);
  CHECK(j["config"]["grid_n"] == 64);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(slurp(dir / "report.csv").rfind("axiom,max_err,tolerance,passed\r\n", 0) == 0);
}

TEST_CASE("exit status 2 names the failed axioms") {
  const auto dir = scratch("sign");
  CHECK(run("check --model sphere --hbar 0.5 --uncorrected-sign --output-dir " + dir.string()) == 2);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["passed"] == false);
  bool jet = false;
  for (const auto& f : j["failures"]) jet = jet || f == "axiom_iv_first_jet";
  CHECK(jet);
}

TEST_CASE("exit status 1 on config errors, and no report") {
  const auto dir = scratch("bad");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"model": "sphere", "hbr": 0.5})";
  }
  const auto out = dir / "out";
  CHECK(run("check --config " + (dir / "cfg.json").string() + " --output-dir " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out / "report.json"));
  CHECK(run("check --model torus --output-dir " + out.string()) == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("check --hbar") == 1);
  CHECK(run("lattice --model hyperbolic --output-dir " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out / "report.json"));
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("merge");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"model": "sphere", "hbar": 0.25, "seed": 3})";
  }
  CHECK(run("calibrate --config " + (dir / "cfg.json").string() + " --hbar 0.5 --output-dir " + dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["config"]["model"] == "sphere");
  CHECK(j["config"]["hbar"] == 0.5);
  CHECK(j["seed"] == 3);
}

TEST_CASE("reports differ only in wall time across reruns and thread counts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  CHECK(run("riemann --deterministic --threads 1 --output-dir " + a.string()) == 0);
  CHECK(run("riemann --deterministic --threads 3 --output-dir " + b.string()) == 0);
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  auto ja = nlohmann::json::parse(slurp(a / "report.json")), jb = nlohmann::json::parse(slurp(b / "report.json"));
  for (auto* j : {&ja, &jb}) {
    j->erase("wall_time_s");
    (*j)["config"].erase("output_dir");
    (*j)["config"].erase("threads");
  }
  CHECK(ja == jb);
}
