#pragma once

// Verification suites. Each check is isolated: an exception inside one
// becomes a failed record and the remaining checks still run.

#include <string>
#include <vector>

#include "wdvv/config.hpp"
#include "wdvv/report.hpp"

namespace wdvv {

/// Records of one suite; throws ConfigError for an unknown name.
std::vector<CheckRecord> run_suite(const std::string& name, const RunConfig& cfg);

/// Validates cfg, runs the selected suites (threaded when cfg.parallel) and
/// assembles the report in canonical suite order. Writes the trajectory CSV
/// when the euler-top suite runs and cfg.trajectory_path is set.
Report run(const RunConfig& cfg);

}  // namespace wdvv
