#pragma once

#include <string>

#include <json.hpp>

#include "calbench/harness.hpp"

namespace calbench {

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Writes report.json plus the CSV tables into `dir` (created if missing).
void export_report(const ExperimentReport& report, const std::string& dir);

/// Re-renders the CSV tables from a stored report (the `report` subcommand).
void write_csv_tables(const ExperimentReport& report, const std::string& dir);

void write_truth_csv(const TruthData& truth, const std::string& path);

/// %.17g formatting (round-trips doubles exactly); used by every CSV writer.
std::string format_double(double v);

}  // namespace calbench
