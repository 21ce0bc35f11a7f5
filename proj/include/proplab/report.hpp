#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "proplab/experiments.hpp"

namespace proplab {

inline constexpr const char* kReportSchemaVersion = "1.0";

nlohmann::json build_report(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_time_s);

// RFC 4180: CRLF records, fields quoted when they contain , " CR or LF.
void write_csv(std::ostream& out, const Table& t);
std::string csv_field(const std::string& s);
std::string format_number(double v);

// Writes report.json and report.csv into cfg.output_dir (created if needed).
void write_report(const ExperimentConfig& cfg, const ExperimentResult& res, double wall_time_s);

}  // namespace proplab
