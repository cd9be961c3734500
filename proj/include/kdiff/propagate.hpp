#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdiff/kick.hpp"
#include "kdiff/rng.hpp"
#include "kdiff/series.hpp"
#include "kdiff/state.hpp"
#include "kdiff/system.hpp"

namespace kdiff {

// Banded kernels. The OpenMP versions parallelize over output rows; each row
// is accumulated serially in a fixed order, so they are bitwise identical to
// the serial references in kdiff::ref regardless of thread count.
void apply_transition_banded(const TransitionMatrix& w, std::span<const double> in,
                             std::span<double> out);
void apply_kick_banded(const KickMatrix& b, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out);

namespace ref {
void apply_transition_banded(const TransitionMatrix& w, std::span<const double> in,
                             std::span<double> out);
void apply_kick_banded(const KickMatrix& b, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out);
} // namespace ref

/// One master-equation step P_n(N) = sum_m W_nm P_m(N-1); probability scattered
/// outside the truncation is added to the leak.
MomentumDistribution step_master(const MomentumDistribution& p, const TransitionMatrix& w);

struct MeasuredRun {
    std::vector<MomentumDistribution> series; // index N = 0..last_n
    std::vector<double> step_leak;            // leak gained by step N (size last_n)
    MomentSeries moments;                     // orders 1..4, se = 0
    bool complete = true;
    int last_n = 0;
};

/// Iterates the master equation for `kicks` steps, recording the full series.
/// If the cumulative leak exceeds the budget the run stops and is flagged
/// partial, carrying the last valid kick count.
MeasuredRun evolve_measured(const KickedSystem& system, const TransitionMatrix& w,
                            MomentumDistribution p0, int kicks, double leak_budget = 1e-6);
MeasuredRun evolve_measured(const KickedSystem& system, MomentumDistribution p0, int kicks,
                            double leak_budget = 1e-6);

enum class CoherentPath {
    spectral, // angle-grid transform propagator (default, fast)
    banded    // Toeplitz matrix product, kept as a cross-check path
};

/// One coherent Floquet step U_free(tau) U_kick U_free(T - tau) with no
/// measurement. Both paths agree within 1e-10 entrywise.
StateVector step_coherent(const StateVector& psi, const KickedSystem& system, const KickMatrix& b,
                          CoherentPath path = CoherentPath::spectral);

struct CoherentRun {
    std::vector<MomentumDistribution> series; // |amps|^2 per kick, to bound memory
    MomentSeries moments;
    StateVector final_state;
    bool complete = true;
    int last_n = 0;
};

CoherentRun evolve_coherent(const KickedSystem& system, const KickMatrix& b, StateVector psi0,
                            int kicks, double leak_budget = 1e-6,
                            CoherentPath path = CoherentPath::spectral);

/// Projective measurement: returns n with probability P_n by inverse-CDF
/// sampling over the truncated lattice. A draw landing in the leak mass is
/// redrawn within the support and counted in *resample_events.
int sample_measurement(const MomentumDistribution& p, RngCursor& rng,
                       std::int64_t* resample_events = nullptr);

/// Trajectory mode: explicit projective sampling, one counter-based stream per
/// trajectory, averaged into a Monte Carlo moment series (32 batch means).
MomentSeries run_trajectories(const KickedSystem& system, const TransitionMatrix& w, int n0,
                              int kicks, int trajectories, std::uint64_t seed,
                              std::int64_t* resample_events = nullptr);

} // namespace kdiff
