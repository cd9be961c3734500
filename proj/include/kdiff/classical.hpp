#pragma once

#include <cstdint>
#include <vector>

#include "kdiff/rng.hpp"
#include "kdiff/series.hpp"
#include "kdiff/system.hpp"

namespace kdiff {

struct ClassicalState {
    double x = 0.0; // angle, kept in [-pi, pi)
    double p = 0.0;
};

/// Reduce an angle into [-pi, pi).
double wrap_angle(double x);

/// Particle swarm with deterministic per-particle random streams: the variate
/// consumed by particle i at kick k is a pure function of
/// (master_seed, i, k), so results do not depend on scheduling.
struct ClassicalEnsemble {
    std::vector<ClassicalState> particles;
    std::uint64_t master_seed = 0;

    /// count particles at momentum p0 with angles drawn uniformly from
    /// [-pi, pi) (kick counter 0 is reserved for initialization draws).
    static ClassicalEnsemble uniform_angles(std::size_t count, double p0, std::uint64_t seed);
    static ClassicalEnsemble from_states(std::vector<ClassicalState> states, std::uint64_t seed);
};

enum class ClassicalMode { twist, randomized };

/// Radial twist map: x advances by H0'(p) T first, then p by -lambda V'(x) at
/// the updated angle.
ClassicalState step_twist(const ClassicalState& s, const KickedSystem& system);

/// Angle-randomized map: x is replaced by a fresh uniform xi before the force
/// is applied (the classical mimic of a momentum measurement).
ClassicalState step_randomized(const ClassicalState& s, const KickedSystem& system,
                               const CounterStream& stream, std::uint32_t kick);

/// Advances the ensemble `kicks` steps and returns per-kick moments 1..4 with
/// batch-means standard errors (32 batches). Deterministic for a fixed
/// master_seed and particle count, bitwise independent of thread count. When
/// `batch_series` is given it receives the per-batch mean series (se = 0),
/// e.g. for batch-means errors of fitted quantities.
MomentSeries run_ensemble(const KickedSystem& system, ClassicalEnsemble& ensemble, int kicks,
                          ClassicalMode mode, std::vector<MomentSeries>* batch_series = nullptr);

namespace ref {
/// Serial reference for run_ensemble; must agree bitwise with the parallel
/// version.
MomentSeries run_ensemble(const KickedSystem& system, ClassicalEnsemble& ensemble, int kicks,
                          ClassicalMode mode, std::vector<MomentSeries>* batch_series = nullptr);
} // namespace ref

/// Exact (quadrature-level) moment recursion for the randomized map: since
/// xi_N is independent of p_{N-1}, each <<p_N^k>> expands binomially with
/// angle averages of force powers. se = 0 everywhere.
MomentSeries exact_randomized_moments(const KickedSystem& system, MomentRecord p0_moments,
                                      int kicks);

} // namespace kdiff
