#include "kdiff/classical.hpp"

#include <cmath>
#include <numbers>

#include "kdiff/errors.hpp"

namespace kdiff {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kBatches = 32;
} // namespace

double wrap_angle(double x) {
    return x - 2.0 * kPi * std::floor((x + kPi) / (2.0 * kPi));
}

ClassicalEnsemble ClassicalEnsemble::uniform_angles(std::size_t count, double p0,
                                                    std::uint64_t seed) {
    ClassicalEnsemble e;
    e.master_seed = seed;
    e.particles.resize(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        const CounterStream stream(seed, static_cast<std::uint64_t>(i));
        e.particles[static_cast<std::size_t>(i)] = {stream.uniform_angle(0, 0), p0};
    }
    return e;
}

ClassicalEnsemble ClassicalEnsemble::from_states(std::vector<ClassicalState> states,
                                                 std::uint64_t seed) {
    ClassicalEnsemble e;
    e.master_seed = seed;
    e.particles = std::move(states);
    return e;
}

ClassicalState step_twist(const ClassicalState& s, const KickedSystem& system) {
    ClassicalState next;
    next.x = wrap_angle(s.x + system.h0.derivative(s.p) * system.period_t);
    next.p = s.p + system.lambda * system.v.force(next.x);
    return next;
}

ClassicalState step_randomized(const ClassicalState& s, const KickedSystem& system,
                               const CounterStream& stream, std::uint32_t kick) {
    ClassicalState next;
    next.x = stream.uniform_angle(kick, 0);
    next.p = s.p + system.lambda * system.v.force(next.x);
    return next;
}

namespace {

// One batch of particles, advanced serially; per-kick moment sums land in
// acc[kick*4 + order]. Shared by the OpenMP and serial drivers so the two are
// bitwise identical.
void run_batch(const KickedSystem& system, ClassicalEnsemble& ensemble, int kicks,
               ClassicalMode mode, std::size_t lo, std::size_t hi, double* acc) {
    for (std::size_t i = lo; i < hi; ++i) {
        ClassicalState s = ensemble.particles[i];
        const CounterStream stream(ensemble.master_seed, static_cast<std::uint64_t>(i));
        for (int k = 0; k <= kicks; ++k) {
            if (k > 0)
                s = mode == ClassicalMode::twist
                        ? step_twist(s, system)
                        : step_randomized(s, system, stream, static_cast<std::uint32_t>(k));
            const double p1 = s.p;
            const double p2 = p1 * p1;
            double* row = acc + static_cast<std::size_t>(k) * 4;
            row[0] += p1;
            row[1] += p2;
            row[2] += p2 * p1;
            row[3] += p2 * p2;
        }
        ensemble.particles[i] = s;
    }
}

void fill_batch_series(const std::vector<double>& acc, std::size_t count, int kicks, int nb,
                       std::vector<MomentSeries>& batches) {
    const std::size_t rows = static_cast<std::size_t>(kicks) + 1;
    batches.assign(static_cast<std::size_t>(nb), {});
    for (int b = 0; b < nb; ++b) {
        const std::size_t blo = count * static_cast<std::size_t>(b) / nb;
        const std::size_t bhi = count * (static_cast<std::size_t>(b) + 1) / nb;
        auto& series = batches[static_cast<std::size_t>(b)];
        series.mean.resize(rows);
        series.se.resize(rows);
        for (std::size_t k = 0; k < rows; ++k) {
            const double* row = acc.data() + (static_cast<std::size_t>(b) * rows + k) * 4;
            const double inv = 1.0 / static_cast<double>(bhi - blo);
            series.mean[k] = MomentRecord{row[0] * inv, row[1] * inv, row[2] * inv, row[3] * inv};
        }
    }
}

MomentSeries assemble_series(const std::vector<double>& acc, std::size_t count, int kicks,
                             int nb) {
    const std::size_t rows = static_cast<std::size_t>(kicks) + 1;
    MomentSeries series;
    series.batches = nb;
    series.mean.resize(rows);
    series.se.resize(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        for (int ord = 0; ord < 4; ++ord) {
            double total = 0.0;
            for (int b = 0; b < nb; ++b)
                total += acc[(static_cast<std::size_t>(b) * rows + k) * 4 +
                             static_cast<std::size_t>(ord)];
            const double mean = total / static_cast<double>(count);
            double var = 0.0;
            for (int b = 0; b < nb; ++b) {
                const std::size_t blo = count * static_cast<std::size_t>(b) / nb;
                const std::size_t bhi = count * (static_cast<std::size_t>(b) + 1) / nb;
                const double bmean = acc[(static_cast<std::size_t>(b) * rows + k) * 4 +
                                         static_cast<std::size_t>(ord)] /
                                     static_cast<double>(bhi - blo);
                var += (bmean - mean) * (bmean - mean);
            }
            const double se = nb > 1 ? std::sqrt(var / (nb * (nb - 1.0))) : 0.0;
            auto& m = series.mean[k];
            auto& s = series.se[k];
            switch (ord) {
            case 0: m.m1 = mean; s.m1 = se; break;
            case 1: m.m2 = mean; s.m2 = se; break;
            case 2: m.m3 = mean; s.m3 = se; break;
            default: m.m4 = mean; s.m4 = se; break;
            }
        }
    }
    return series;
}

void check_run_inputs(const ClassicalEnsemble& ensemble, int kicks, ClassicalMode mode,
                      const KickedSystem& system) {
    if (ensemble.particles.empty()) throw InvariantError("run_ensemble: empty ensemble");
    if (kicks < 1) throw InvariantError("run_ensemble: kicks must be >= 1");
    if (mode == ClassicalMode::twist && !system.h0.has_derivative())
        throw InvariantError("run_ensemble: twist map needs H0 with a derivative");
}

} // namespace

MomentSeries run_ensemble(const KickedSystem& system, ClassicalEnsemble& ensemble, int kicks,
                          ClassicalMode mode, std::vector<MomentSeries>* batch_series) {
    check_run_inputs(ensemble, kicks, mode, system);
    const std::size_t count = ensemble.particles.size();
    const int nb = static_cast<int>(std::min<std::size_t>(kBatches, count));
    const std::size_t rows = static_cast<std::size_t>(kicks) + 1;
    std::vector<double> acc(static_cast<std::size_t>(nb) * rows * 4, 0.0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nb; ++b) {
        const std::size_t lo = count * static_cast<std::size_t>(b) / nb;
        const std::size_t hi = count * (static_cast<std::size_t>(b) + 1) / nb;
        run_batch(system, ensemble, kicks, mode, lo, hi,
                  acc.data() + static_cast<std::size_t>(b) * rows * 4);
    }
    if (batch_series) fill_batch_series(acc, count, kicks, nb, *batch_series);
    return assemble_series(acc, count, kicks, nb);
}

namespace ref {

MomentSeries run_ensemble(const KickedSystem& system, ClassicalEnsemble& ensemble, int kicks,
                          ClassicalMode mode, std::vector<MomentSeries>* batch_series) {
    check_run_inputs(ensemble, kicks, mode, system);
    const std::size_t count = ensemble.particles.size();
    const int nb = static_cast<int>(std::min<std::size_t>(kBatches, count));
    const std::size_t rows = static_cast<std::size_t>(kicks) + 1;
    std::vector<double> acc(static_cast<std::size_t>(nb) * rows * 4, 0.0);
    for (int b = 0; b < nb; ++b) {
        const std::size_t lo = count * static_cast<std::size_t>(b) / nb;
        const std::size_t hi = count * (static_cast<std::size_t>(b) + 1) / nb;
        run_batch(system, ensemble, kicks, mode, lo, hi,
                  acc.data() + static_cast<std::size_t>(b) * rows * 4);
    }
    if (batch_series) fill_batch_series(acc, count, kicks, nb, *batch_series);
    return assemble_series(acc, count, kicks, nb);
}

} // namespace ref

MomentSeries exact_randomized_moments(const KickedSystem& system, MomentRecord p0_moments,
                                      int kicks) {
    if (kicks < 1) throw InvariantError("exact_randomized_moments: kicks must be >= 1");
    // Angle averages <f^j>, j = 1..4, by quadrature; computed once.
    double fm[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
    for (int j = 1; j <= 4; ++j) fm[j] = mean_force_power(system.v, system.grid_g, j);
    const double lam = system.lambda;
    const double l1 = lam * fm[1];
    const double l2 = lam * lam * fm[2];
    const double l3 = lam * lam * lam * fm[3];
    const double l4 = lam * lam * lam * lam * fm[4];

    MomentSeries series;
    series.mean.resize(static_cast<std::size_t>(kicks) + 1);
    series.se.resize(static_cast<std::size_t>(kicks) + 1);
    series.mean[0] = p0_moments;
    for (int k = 1; k <= kicks; ++k) {
        const MomentRecord& prev = series.mean[static_cast<std::size_t>(k - 1)];
        MomentRecord next;
        // <<(p + lambda f)^k>> expanded binomially; xi independent of p.
        next.m1 = prev.m1 + l1;
        next.m2 = prev.m2 + 2.0 * l1 * prev.m1 + l2;
        next.m3 = prev.m3 + 3.0 * l1 * prev.m2 + 3.0 * l2 * prev.m1 + l3;
        next.m4 = prev.m4 + 4.0 * l1 * prev.m3 + 6.0 * l2 * prev.m2 + 4.0 * l3 * prev.m1 + l4;
        series.mean[static_cast<std::size_t>(k)] = next;
    }
    return series;
}

} // namespace kdiff
