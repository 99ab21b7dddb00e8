#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace qtoa::app {

enum class OutputFormat { csv, json };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
};

// Each runner writes <out_dir>/<command>.{csv,json}. With csv output the
// table goes to the .csv file and the summary (with the config echo) to the
// .json file; with json output both go to the .json file.
void run_transmit(const ExperimentConfig& config, const RunOptions& options);
void run_reflect(const ExperimentConfig& config, const RunOptions& options);
void run_incoming(const ExperimentConfig& config, const RunOptions& options);
void run_sweep(const ExperimentConfig& config, const RunOptions& options);
void run_portrait(const ExperimentConfig& config, const RunOptions& options);

// Quick invariant checks. One line per check on `log`; returns the number
// of failures.
int run_selfcheck(const RunOptions& options, std::ostream& log);

} // namespace qtoa::app
