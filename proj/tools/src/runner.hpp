#pragma once

#include <optional>
#include <string>

#include "scenario.hpp"

namespace dvsg::cli {

enum ExitCode : int { kExitOk = 0, kExitComputation = 1, kExitConfig = 2 };

struct RunOptions {
  bool timings = false;               // adds wall-clock seconds per task (breaks byte identity)
  std::optional<std::string> csv_dir; // writes every numeric array of the report as CSV
  unsigned threads = 1;               // Monte Carlo worker threads; results do not depend on it
};

struct RunOutcome {
  Json report;
  int exit_code = kExitOk;
};

// Runs the scenario's tasks in order. Later tasks reuse earlier spectral
// results. Task failures are recorded in the report, never thrown.
RunOutcome run_scenario(const Scenario& s, const RunOptions& opts = {});

// Finite numbers stay numbers; infinities become "infinity" / "-infinity".
Json number(double x);

// Short type name of a library or config exception, for reports.
std::string error_kind(const std::exception& e);

void write_csv(const Json& report, const std::string& dir);

}  // namespace dvsg::cli
