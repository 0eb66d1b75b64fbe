#pragma once

#include <filesystem>

#include "subdiff/harness/config.hpp"
#include "subdiff/harness/report.hpp"

namespace subdiff::harness {

struct RunOptions {
  std::filesystem::path out_dir;  // empty: use config.output_dir
  unsigned workers = 1;
  bool write_files = true;
};

// Runs one experiment, writes its CSV files and report, and returns the
// report. Component errors are rethrown with the experiment name prepended.
ComparisonReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

// 0 pass, 1 tolerance failure, 2 configuration error, 3 internal error.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitInternal = 3 };

}  // namespace subdiff::harness
