#include "kdiff/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kdiff/errors.hpp"
#include "kdiff/fft.hpp"
#include "kdiff/observables.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

namespace {
constexpr double kPi = std::numbers::pi;

inline void transition_row(const TransitionMatrix& w, std::span<const double> in, int n,
                           double& out_n) {
    const int mm = w.basis_m;
    const int lo = std::max(-mm, n - w.bandwidth);
    const int hi = std::min(mm, n + w.bandwidth);
    double s = 0.0;
    for (int m = lo; m <= hi; ++m)
        s += w.stencil(n - m) * in[static_cast<std::size_t>(m + mm)];
    out_n = s;
}

inline void kick_row(const KickMatrix& b, std::span<const std::complex<double>> in, int n,
                     std::complex<double>& out_n) {
    const int mm = b.basis_m;
    const int lo = std::max(-mm, n - b.bandwidth);
    const int hi = std::min(mm, n + b.bandwidth);
    std::complex<double> s = 0.0;
    for (int m = lo; m <= hi; ++m)
        s += b.stencil(n - m) * in[static_cast<std::size_t>(m + mm)];
    out_n = s;
}

} // namespace

void apply_transition_banded(const TransitionMatrix& w, std::span<const double> in,
                             std::span<double> out) {
    const int mm = w.basis_m;
#pragma omp parallel for schedule(static)
    for (int n = -mm; n <= mm; ++n)
        transition_row(w, in, n, out[static_cast<std::size_t>(n + mm)]);
}

void apply_kick_banded(const KickMatrix& b, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) {
    const int mm = b.basis_m;
#pragma omp parallel for schedule(static)
    for (int n = -mm; n <= mm; ++n)
        kick_row(b, in, n, out[static_cast<std::size_t>(n + mm)]);
}

namespace ref {

void apply_transition_banded(const TransitionMatrix& w, std::span<const double> in,
                             std::span<double> out) {
    const int mm = w.basis_m;
    for (int n = -mm; n <= mm; ++n)
        transition_row(w, in, n, out[static_cast<std::size_t>(n + mm)]);
}

void apply_kick_banded(const KickMatrix& b, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) {
    const int mm = b.basis_m;
    for (int n = -mm; n <= mm; ++n)
        kick_row(b, in, n, out[static_cast<std::size_t>(n + mm)]);
}

} // namespace ref

MomentumDistribution step_master(const MomentumDistribution& p, const TransitionMatrix& w) {
    if (p.basis_m != w.basis_m)
        throw InvariantError("step_master: distribution basis M = " + std::to_string(p.basis_m) +
                             " does not match transition matrix M = " +
                             std::to_string(w.basis_m));
    MomentumDistribution next = MomentumDistribution::zero(p.basis_m);
    apply_transition_banded(w, p.probs, next.probs);
    next.leak = p.leak + (p.sum() - next.sum());
    return next;
}

namespace {

MomentRecord lattice_moments(const MomentumDistribution& p, double hbar) {
    return moments_from_distribution(p, hbar).m;
}

} // namespace

MeasuredRun evolve_measured(const KickedSystem& system, const TransitionMatrix& w,
                            MomentumDistribution p0, int kicks, double leak_budget) {
    if (kicks < 1) throw InvariantError("evolve_measured: kicks must be >= 1");
    p0.check();
    MeasuredRun run;
    run.series.reserve(static_cast<std::size_t>(kicks) + 1);
    run.moments.mean.reserve(static_cast<std::size_t>(kicks) + 1);
    run.series.push_back(std::move(p0));
    run.moments.mean.push_back(lattice_moments(run.series.back(), system.hbar));
    run.moments.se.push_back({});
    for (int k = 1; k <= kicks; ++k) {
        MomentumDistribution next = step_master(run.series.back(), w);
        const double gained = next.leak - run.series.back().leak;
        if (next.leak > leak_budget) {
            run.complete = false;
            break;
        }
        run.step_leak.push_back(gained);
        run.moments.mean.push_back(lattice_moments(next, system.hbar));
        run.moments.se.push_back({});
        run.series.push_back(std::move(next));
        run.last_n = k;
    }
    return run;
}

MeasuredRun evolve_measured(const KickedSystem& system, MomentumDistribution p0, int kicks,
                            double leak_budget) {
    const TransitionMatrix w = transition_matrix(kick_matrix(system));
    return evolve_measured(system, w, std::move(p0), kicks, leak_budget);
}

namespace {

// Free-evolution phases exp(-i H0(p_n) t / hbar) on the lattice.
std::vector<std::complex<double>> free_phases(const KickedSystem& system, double t) {
    const int mm = system.basis_m;
    std::vector<std::complex<double>> ph(static_cast<std::size_t>(system.dim()));
#pragma omp parallel for schedule(static)
    for (int n = -mm; n <= mm; ++n) {
        const double arg = -system.h0_at(n) * t / system.hbar;
        ph[static_cast<std::size_t>(n + mm)] = {std::cos(arg), std::sin(arg)};
    }
    return ph;
}

std::vector<std::complex<double>> kick_factor_grid(const KickedSystem& system) {
    const int g = system.grid_g;
    const double z = system.lambda / system.hbar;
    std::vector<std::complex<double>> phi(static_cast<std::size_t>(g));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g; ++j) {
        const double x = -kPi + 2.0 * kPi * j / g;
        const double arg = -z * system.v.value(x);
        phi[static_cast<std::size_t>(j)] = {std::cos(arg), std::sin(arg)};
    }
    return phi;
}

struct CoherentWorkspace {
    std::vector<std::complex<double>> phase_before; // U_free(T - tau)
    std::vector<std::complex<double>> phase_after;  // U_free(tau)
    std::vector<std::complex<double>> kick_grid;    // exp(-i lambda V(x_j)/hbar)
    std::vector<std::complex<double>> grid_a, grid_b;

    explicit CoherentWorkspace(const KickedSystem& system)
        : phase_before(free_phases(system, system.period_t - system.tau)),
          phase_after(free_phases(system, system.tau)),
          kick_grid(kick_factor_grid(system)),
          grid_a(static_cast<std::size_t>(system.grid_g)),
          grid_b(static_cast<std::size_t>(system.grid_g)) {}
};

// Kick applied on the angle grid: embed coefficients (with the (-1)^n factors
// of the shifted grid), backward transform, multiply, forward transform back.
void spectral_kick(const KickedSystem& system, CoherentWorkspace& ws,
                   std::vector<std::complex<double>>& amps) {
    const int g = system.grid_g;
    const int mm = system.basis_m;
    std::fill(ws.grid_a.begin(), ws.grid_a.end(), std::complex<double>{0.0, 0.0});
    for (int n = -mm; n <= mm; ++n) {
        const int idx = n >= 0 ? n : n + g;
        const double parity = (n % 2 == 0) ? 1.0 : -1.0;
        ws.grid_a[static_cast<std::size_t>(idx)] =
            parity * amps[static_cast<std::size_t>(n + mm)];
    }
    fft_backward(ws.grid_a, ws.grid_b);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g; ++j)
        ws.grid_b[static_cast<std::size_t>(j)] *= ws.kick_grid[static_cast<std::size_t>(j)];
    fft_forward(ws.grid_b, ws.grid_a);
    const double inv_g = 1.0 / g;
    for (int n = -mm; n <= mm; ++n) {
        const int idx = n >= 0 ? n : n + g;
        const double parity = (n % 2 == 0) ? 1.0 : -1.0;
        amps[static_cast<std::size_t>(n + mm)] =
            parity * inv_g * ws.grid_a[static_cast<std::size_t>(idx)];
    }
}

StateVector coherent_step_impl(const StateVector& psi, const KickedSystem& system,
                               const KickMatrix& b, CoherentPath path, CoherentWorkspace& ws) {
    StateVector next = psi;
    const std::size_t dim = next.amps.size();
    for (std::size_t i = 0; i < dim; ++i) next.amps[i] *= ws.phase_before[i];
    if (path == CoherentPath::spectral) {
        spectral_kick(system, ws, next.amps);
    } else {
        std::vector<std::complex<double>> kicked(dim);
        apply_kick_banded(b, next.amps, kicked);
        next.amps = std::move(kicked);
    }
    for (std::size_t i = 0; i < dim; ++i) next.amps[i] *= ws.phase_after[i];
    next.leak = psi.leak + (psi.norm2() - next.norm2());
    return next;
}

} // namespace

StateVector step_coherent(const StateVector& psi, const KickedSystem& system, const KickMatrix& b,
                          CoherentPath path) {
    if (psi.basis_m != system.basis_m || b.basis_m != system.basis_m)
        throw InvariantError("step_coherent: basis mismatch");
    CoherentWorkspace ws(system);
    return coherent_step_impl(psi, system, b, path, ws);
}

CoherentRun evolve_coherent(const KickedSystem& system, const KickMatrix& b, StateVector psi0,
                            int kicks, double leak_budget, CoherentPath path) {
    if (kicks < 1) throw InvariantError("evolve_coherent: kicks must be >= 1");
    if (psi0.basis_m != system.basis_m) throw InvariantError("evolve_coherent: basis mismatch");
    CoherentWorkspace ws(system);
    CoherentRun run;
    run.series.reserve(static_cast<std::size_t>(kicks) + 1);
    run.series.push_back(psi0.to_distribution());
    run.moments.mean.push_back(lattice_moments(run.series.back(), system.hbar));
    run.moments.se.push_back({});
    StateVector cur = std::move(psi0);
    for (int k = 1; k <= kicks; ++k) {
        StateVector next = coherent_step_impl(cur, system, b, path, ws);
        if (next.leak > leak_budget) {
            run.complete = false;
            break;
        }
        run.series.push_back(next.to_distribution());
        run.moments.mean.push_back(lattice_moments(run.series.back(), system.hbar));
        run.moments.se.push_back({});
        cur = std::move(next);
        run.last_n = k;
    }
    run.final_state = std::move(cur);
    return run;
}

int sample_measurement(const MomentumDistribution& p, RngCursor& rng,
                       std::int64_t* resample_events) {
    const double total = p.sum();
    if (!(total > 0.0))
        throw InvariantError("sample_measurement: distribution has no probability mass");
    const int mm = p.basis_m;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double r = rng.next();
        double cum = 0.0;
        for (int n = -mm; n <= mm; ++n) {
            cum += p.at(n);
            if (r < cum) return n;
        }
        // Landed in the leak mass (or roundoff tail): resample within support.
        if (resample_events) ++(*resample_events);
    }
    throw InvariantError("sample_measurement: resample cap exceeded; leak mass too large");
}

MomentSeries run_trajectories(const KickedSystem& system, const TransitionMatrix& w, int n0,
                              int kicks, int trajectories, std::uint64_t seed,
                              std::int64_t* resample_events) {
    if (kicks < 1) throw InvariantError("run_trajectories: kicks must be >= 1");
    if (trajectories < 1) throw InvariantError("run_trajectories: needs at least one trajectory");
    if (n0 < -system.basis_m || n0 > system.basis_m)
        throw InvariantError("run_trajectories: initial index outside basis");

    constexpr int kBatches = 32;
    const int nb = std::min(kBatches, trajectories);
    const std::size_t rows = static_cast<std::size_t>(kicks) + 1;
    // batch-major accumulators: [batch][kick][order]
    std::vector<double> acc(static_cast<std::size_t>(nb) * rows * 4, 0.0);
    std::vector<std::int64_t> events(static_cast<std::size_t>(nb), 0);

    const int mm = system.basis_m;
    const int bw = w.bandwidth;
    const double hbar = system.hbar;
    bool resample_overflow = false; // exceptions may not cross the parallel region

#pragma omp parallel for schedule(static)
    for (int batch = 0; batch < nb; ++batch) {
        const int lo = static_cast<int>(static_cast<long long>(trajectories) * batch / nb);
        const int hi = static_cast<int>(static_cast<long long>(trajectories) * (batch + 1) / nb);
        double* out = acc.data() + static_cast<std::size_t>(batch) * rows * 4;
        for (int t = lo; t < hi; ++t) {
            const CounterStream stream(seed, static_cast<std::uint64_t>(t));
            int n = n0;
            for (int k = 0; k <= kicks; ++k) {
                if (k > 0) {
                    RngCursor cursor(stream, static_cast<std::uint32_t>(k));
                    // Inverse CDF over the banded column of W; leak mass resamples.
                    int drawn = n;
                    bool ok = false;
                    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
                        const double r = cursor.next();
                        double cum = 0.0;
                        const int llo = std::max(-mm, n - bw);
                        const int lhi = std::min(mm, n + bw);
                        for (int l = llo; l <= lhi; ++l) {
                            cum += w.stencil(l - n);
                            if (r < cum) {
                                drawn = l;
                                ok = true;
                                break;
                            }
                        }
                        if (!ok) ++events[static_cast<std::size_t>(batch)];
                    }
                    if (!ok) {
                        resample_overflow = true;
                        break;
                    }
                    n = drawn;
                }
                const double p1 = n * hbar;
                const double p2 = p1 * p1;
                double* row = out + static_cast<std::size_t>(k) * 4;
                row[0] += p1;
                row[1] += p2;
                row[2] += p2 * p1;
                row[3] += p2 * p2;
            }
        }
    }

    if (resample_overflow)
        throw InvariantError("run_trajectories: resample cap exceeded; leak mass too large");

    MomentSeries series;
    series.batches = nb;
    series.mean.resize(rows);
    series.se.resize(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        for (int ord = 0; ord < 4; ++ord) {
            double total = 0.0;
            for (int batch = 0; batch < nb; ++batch)
                total += acc[(static_cast<std::size_t>(batch) * rows + k) * 4 +
                             static_cast<std::size_t>(ord)];
            const double mean = total / trajectories;
            double var = 0.0;
            for (int batch = 0; batch < nb; ++batch) {
                const int lo = static_cast<int>(static_cast<long long>(trajectories) * batch / nb);
                const int hi =
                    static_cast<int>(static_cast<long long>(trajectories) * (batch + 1) / nb);
                const double bmean = acc[(static_cast<std::size_t>(batch) * rows + k) * 4 +
                                         static_cast<std::size_t>(ord)] /
                                     (hi - lo);
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
    if (resample_events) {
        std::int64_t total = 0;
        for (auto e : events) total += e;
        *resample_events = total;
    }
    return series;
}

} // namespace kdiff
