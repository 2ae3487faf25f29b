// Run orchestration: evolve a configured run, write its traces and manifest,
// and summarise trace directories.
#pragma once

#include "xrn/config.hpp"
#include "xrn/evolve.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xrn {

std::string code_version();

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  GridSpec grid{};
  EvolutionConfig evolution{};
  double wall_time_s = 0.0;
  ExitStatus status = ExitStatus::completed;
  std::string message;
  std::vector<std::string> outputs;  ///< relative to the output directory
  double dt = 0.0;
  long steps = 0;
  double e0 = 0.0;
  std::optional<BreakdownReport> breakdown;
  BreakdownThresholds thresholds{};
};

nlohmann::json to_json(const RunManifest& m);
int exit_code(ExitStatus s);

struct RunResult {
  RunManifest manifest;
  RunArtifacts artifacts;
};

/// Evolves the config and writes config.ini, horizon_trace.csv, energy.csv,
/// norms.csv, optional snapshots/ and manifest.json into out_dir.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

void write_horizon_csv(const std::filesystem::path& path, const std::vector<HorizonTrace>& traces);
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& records);
void write_norms_csv(const std::filesystem::path& path, const std::vector<NormRecord>& norms);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Column by name; throws std::out_of_range when absent.
  std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

/// Markdown summary of a run directory with fitted rates. Written to
/// dir/summary.md and returned.
std::string write_report(const std::filesystem::path& dir);

}  // namespace xrn
