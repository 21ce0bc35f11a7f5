#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "proplab/errors.hpp"
#include "proplab/experiments.hpp"
#include "proplab/parallel.hpp"
#include "proplab/report.hpp"

using namespace proplab;

namespace {

struct Flags {
  std::string model, config, output_dir;
  double hbar = 0;
  int grid_n = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool uncorrected = false, deterministic = false;
};

// flags given on the command line override the config file
ExperimentConfig assemble(const std::string& command, const Flags& f, const CLI::App& sub) {
  ExperimentConfig cfg;
  cfg.command = command;
  bool file_threads = false;
  if (sub.count("--config")) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("command") && j["command"] != command)
      throw ConfigError("config file names a different command");
    cfg = config_from_json(j, cfg);
    file_threads = j.contains("threads");
  }
  nlohmann::json over = nlohmann::json::object();
  if (sub.count("--model")) over["model"] = f.model;
  if (sub.count("--hbar")) over["hbar"] = f.hbar;
  if (sub.count("--grid-n")) over["grid_n"] = f.grid_n;
  if (sub.count("--seed")) over["seed"] = f.seed;
  if (sub.count("--output-dir")) over["output_dir"] = f.output_dir;
  if (sub.count("--uncorrected-sign")) over["uncorrected_sign"] = f.uncorrected;
  if (sub.count("--deterministic")) over["deterministic"] = f.deterministic;
  if (sub.count("--threads")) {
    over["threads"] = f.threads;
  } else if (const char* env = std::getenv("PROPLAB_THREADS"); env && !file_threads) {
    try {
      over["threads"] = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("PROPLAB_THREADS is not a number: ") + env);
    }
  }
  return config_from_json(over, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proplab: numerical experiments on coherent-state propagators"};
  app.require_subcommand(1);
  Flags f;
  for (const auto& name : experiment_commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--model", f.model, "flat-pq, flat-symmetric, sphere or hyperbolic");
    sub->add_option("--hbar", f.hbar, "Planck constant (default 1)");
    sub->add_option("--grid-n", f.grid_n, "grid points per direction (0 = command default)");
    sub->add_option("--config", f.config, "JSON config file; flags win");
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--output-dir", f.output_dir, "where report.json and report.csv go");
    sub->add_flag("--uncorrected-sign", f.uncorrected, "sphere kernel with the printed sign");
    sub->add_option("--threads", f.threads, "worker threads, 0 = auto (env PROPLAB_THREADS)");
    sub->add_flag("--deterministic", f.deterministic, "fixed reduction order");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  ExperimentConfig cfg;
  try {
    cfg = assemble(sub->get_name(), f, *sub);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  set_thread_count(cfg.threads);

  ExperimentResult res;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    res = run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_report(cfg, res, wall);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  for (const auto& a : res.assertions)
    std::cout << (a.passed ? "pass  " : "FAIL  ") << a.name << "  value=" << format_number(a.value)
              << "  threshold=" << format_number(a.threshold) << '\n';
  if (res.passed()) return 0;
  std::cerr << res.failures().size() << " assertion(s) failed:";
  for (const auto& n : res.failures()) std::cerr << ' ' << n;
  std::cerr << '\n';
  return 2;
}
