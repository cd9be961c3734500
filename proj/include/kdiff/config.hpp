#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdiff/system.hpp"

namespace kdiff {

enum class Scenario {
    classical_twist,      // Table row A
    quantum_coherent,     // Table row B
    quantum_measured,     // Table row C
    classical_randomized, // Table row D
    unitary_model_check,
    full_table
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

/// System block as written in a config file; to_params() materializes the
/// domain objects.
struct SystemConfig {
    std::string h0 = "rotator"; // rotator | polynomial
    double inertia = 1.0;
    std::vector<double> coefficients;    // polynomial H0, ascending powers of p
    std::string potential = "cosine";    // cosine | cosine_sum
    std::vector<Harmonic> harmonics;     // cosine_sum terms
    double lambda = 1.0;
    double period = 1.0;
    double tau = 0.5;
    double hbar = 1.0;
    int basis_m = 256;
    int grid_g = 0; // 0 = auto (smallest power of two >= 4M+1)

    SystemParams to_params() const;
};

struct RunConfig {
    int kicks = 200;
    long long ensemble = 100000; // classical particles
    int trajectories = 0;        // optional trajectory-mode cross-check (0 = off)
    std::uint64_t seed = 12345;
    int p0_index = 0; // delta initial condition at n = p0_index
    double leak_budget = 1e-6;
    std::uint64_t branch_budget = 10'000'000;
    int fit_lo = -1; // -1 = scenario default window
    int fit_hi = -1;
};

struct OutputConfig {
    std::string dir = "out";
    std::string formats = "csv";
    bool dump_w = false;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::quantum_measured;
    SystemConfig system;
    RunConfig run;
    OutputConfig output;
};

/// Scenario-aware defaults (the unitary model check defaults to a small basis
/// and kick count, since its state space is exponential in kicks).
ScenarioConfig default_config(Scenario s);

/// Strict parser for the documented key-value format: unknown keys, type
/// mismatches and range violations throw ConfigError identifying the line and
/// field. Every omitted field keeps its documented default.
ScenarioConfig parse_config(const std::string& text);

/// Canonical echo of a fully resolved config; parse_config(write_config(c))
/// round-trips to an equivalent config.
std::string write_config(const ScenarioConfig& config);

} // namespace kdiff
