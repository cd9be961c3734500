#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kdiff/config.hpp"
#include "kdiff/observables.hpp"

namespace kdiff {

inline constexpr const char* kVersion = "kdiff 0.1.0";

struct ScenarioResult {
    std::string row; // Table row letter A..D, or "-" for the model check
    Scenario scenario = Scenario::quantum_measured;
    std::string verdict; // diffusive | localized | sub-threshold | equivalent
    DiffusionFit fit;
    double d_ql = 0.0; // quasilinear reference lambda^2 <f^2> / T
    std::string expectation;
    bool matches_expectation = true;
    std::string csv_path;
};

struct ScenarioOutcome {
    std::vector<ScenarioResult> results;
    std::filesystem::path out_dir;
    std::filesystem::path report_path; // set for full_table
};

/// Runs a scenario end to end: echoes the resolved config, writes per-run CSV
/// series with a trailing '#' fit summary and a verdict line, and for
/// full_table the four sub-runs plus the report. Budget exhaustion and
/// invariant violations surface as BudgetError / InvariantError (partial CSVs
/// are still written first).
ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// Human-readable table of the four regimes with measured D values, verdicts
/// and pass/fail flags against the expected regime at these parameters.
/// Throws InvariantError on an empty result set.
std::string emit_report(const std::vector<ScenarioResult>& results);

} // namespace kdiff
