#pragma once

#include <array>
#include <optional>

#include "kdiff/series.hpp"
#include "kdiff/state.hpp"
#include "kdiff/system.hpp"

namespace kdiff {

struct MeasuredRun;

struct Window {
    int lo = 0;
    int hi = 0; // inclusive kick indices
    int length() const { return hi - lo + 1; }
};

struct DistributionMoments {
    MomentRecord m;
    std::array<double, 4> leak_bound{}; // worst-case leak contribution per order
};

/// <p^k> = sum_n (n hbar)^k P_n for k = 1..max_order, with the truncation
/// leak's worst-case contribution |leak * (M hbar)^k| reported alongside.
DistributionMoments moments_from_distribution(const MomentumDistribution& p, double hbar,
                                              int max_order = 4);

struct DiffusionFit {
    double friction = 0.0;  // slope of <p> vs t = N T
    double diffusion = 0.0; // slope of <p^2> - <p>^2 vs t
    double residual = 0.0;  // max |fit - data| of the diffusion law over the window
    double friction_residual = 0.0;
    Window window;
};

/// Least-squares friction and diffusion coefficients over a kick window.
/// Throws InvariantError for windows shorter than 3 points or out of range.
DiffusionFit fit_diffusion(const MomentSeries& series, double period_t, Window window);

/// Per-time growth rate of the kinetic energy <p^2>/(2m). The mass comes from
/// the rotator inertia or a pure-quadratic polynomial H0; other free
/// Hamiltonians must pass it explicitly.
double heating_rate(const MomentSeries& series, const KickedSystem& system, Window window,
                    std::optional<double> mass = std::nullopt);

/// Per-kick difference between the measured-quantum <p^4> increments and the
/// exact randomized-classical ones. Requires matched lambda/T/potential inputs
/// by construction and enforces that increments of orders 1..3 agree within
/// 1e-9 before reporting; the difference is the quantum correction, constant
/// in N.
std::vector<double> fourth_moment_discrepancy(const MeasuredRun& quantum,
                                              const MomentSeries& classical_exact,
                                              const KickedSystem& system);

} // namespace kdiff
