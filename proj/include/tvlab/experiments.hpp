#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvlab/config.hpp"
#include "tvlab/ratefit.hpp"

namespace tvlab {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 2, kExitHypothesisH = 3, kExitNumerical = 4 };

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string command;
  Table table;
  std::optional<RateFit> fit;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> meta;  // extra header lines
  int exit_code = kExitOk;
  std::string csv_path;

  bool all_passed() const;
  const Check* check(const std::string& name) const;
  std::string meta_value(const std::string& key) const;
};

ExperimentResult run_norm_rate(const ExperimentConfig& cfg);
ExperimentResult run_tv_rate(const ExperimentConfig& cfg);
ExperimentResult run_optimality(const ExperimentConfig& cfg);
ExperimentResult run_spectrum(const ExperimentConfig& cfg);
ExperimentResult run_tail(const ExperimentConfig& cfg);
ExperimentResult run_cross_validate(const ExperimentConfig& cfg);

/// Dispatch by CLI command name (norm-rate, tv-rate, ...).
ExperimentResult run_command(const std::string& command, const ExperimentConfig& cfg);

/// `cfg.out`, or $TVLAB_OUTPUT_DIR (default ".") joined with <command>.csv.
std::string output_path(const std::string& command, const ExperimentConfig& cfg);

/// CSV with a `# key = value` header block (tool version, config, meta).
void write_csv(const ExperimentResult& result, const ExperimentConfig& cfg, const std::string& path);

/// Numeric rows of a CSV written by write_csv (header block skipped).
std::vector<std::string> read_csv_rows(const std::string& path);

std::string summary(const ExperimentResult& result);

}  // namespace tvlab
