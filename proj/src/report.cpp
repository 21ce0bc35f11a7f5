#include "proplab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "proplab/errors.hpp"

#ifndef PROPLAB_VERSION
#define PROPLAB_VERSION "0.0.0"
#endif

namespace proplab {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// JSON has no NaN or infinity; replace them recursively.
void scrub(json& j) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) j = nullptr;
  } else if (j.is_structured()) {
    for (auto& v : j) scrub(v);
  }
}

json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return finite_or_null(std::get<double>(c));
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return csv_field(*s);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return format_number(std::get<double>(c));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\r\n";
  }
}

json build_report(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_time_s) {
  json asserts = json::array();
  for (const auto& a : res.assertions)
    asserts.push_back({{"name", a.name},
                       {"passed", a.passed},
                       {"value", finite_or_null(a.value)},
                       {"threshold", finite_or_null(a.threshold)},
                       {"detail", a.detail}});
  json rows = json::array();
  for (const auto& r : res.table.rows) {
    json row = json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(std::move(row));
  }
  json results = res.results;
  scrub(results);
  return {{"schema_version", kReportSchemaVersion},
          {"tool", "proplab"},
          {"version", PROPLAB_VERSION},
          {"command", res.command.empty() ? cfg.command : res.command},
          {"config", config_to_json(cfg)},
          {"seed", cfg.seed},
          {"wall_time_s", wall_time_s},
          {"passed", res.passed()},
          {"assertions", asserts},
          {"failures", res.failures()},
          {"results", results},
          {"table", {{"columns", res.table.columns}, {"rows", rows}}}};
}

void write_report(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_time_s) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  {
    std::ofstream js(dir / "report.json");
    if (!js) throw ConfigError("cannot write " + (dir / "report.json").string());
    js << build_report(cfg, res, wall_time_s).dump(2) << '\n';
  }
  std::ofstream csv(dir / "report.csv", std::ios::binary);
  if (!csv) throw ConfigError("cannot write " + (dir / "report.csv").string());
  write_csv(csv, res.table);
}

}  // namespace proplab
