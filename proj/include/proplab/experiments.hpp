#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "proplab/geometry.hpp"

namespace proplab {

struct TruncationBounds {
  double p_min, p_max, q_min, q_max;
};

struct ToleranceOverrides {
  std::optional<double> normalization, hermiticity, idempotency, first_jet;
};

struct ExperimentConfig {
  std::string command;
  ModelName model = ModelName::FlatPQ;
  double hbar = 1.0;
  int grid_n = 0;  // 0 = command default
  std::optional<TruncationBounds> truncation;
  ToleranceOverrides tolerances;
  std::uint64_t seed = 20240601;
  std::string output_dir = ".";
  bool uncorrected_sign = false;
  unsigned threads = 0;
  bool deterministic = false;
};

const std::vector<std::string>& experiment_commands();

// Strict: unknown keys, wrong types and bad values throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& c);

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0;
  double threshold = 0;
  std::string detail;
};

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct ExperimentResult {
  std::string command;
  std::vector<Assertion> assertions;
  nlohmann::json results = nlohmann::json::object();
  Table table;
  bool passed() const;
  std::vector<std::string> failures() const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Default per-direction grid resolution of `command` for `model`.
int default_grid_n(const std::string& command, ModelName model);

}  // namespace proplab
