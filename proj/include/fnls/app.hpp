#pragma once

// Subcommand dispatch: turns a validated RunConfig into a Report.

#include "fnls/config.hpp"
#include "fnls/experiments.hpp"
#include "fnls/report.hpp"

namespace fnls {

Report execute(const RunConfig& cfg);

/// Module-level conversions used by execute(); config is the run echo.
Report to_report(const SmoothingReport& r, nlohmann::json config);
Report to_report(const GrowthReport& r, nlohmann::json config);
Report to_report(const MaskSensitivityReport& r, nlohmann::json config);
Report to_report(const ConvergenceReport& r, nlohmann::json config);

/// Process exit code for an exception escaping execute() or emit_report().
int exit_code_for(const std::exception& e);

}  // namespace fnls
