// Timing comparison between the OpenMP kernels and their serial references:
// banded transition product, banded kick product, classical ensemble sweep and
// the blocked reduction. Also asserts bitwise agreement, which is the whole
// point of the deterministic reduction layout.

#include <chrono>
#include <cstdio>
#include <cstring>

#include <omp.h>

#include "kdiff/classical.hpp"
#include "kdiff/propagate.hpp"
#include "kdiff/reduce.hpp"

using namespace kdiff;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(int reps, F&& fn) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    SystemParams params;
    params.lambda = 5.0;
    params.basis_m = 4096;
    const KickedSystem system = build_system(params);
    const KickMatrix b = kick_matrix(system);
    const TransitionMatrix w = transition_matrix(b);

    // banded stochastic matvec
    {
        MomentumDistribution p = MomentumDistribution::delta(params.basis_m, 0);
        for (int i = 0; i < 8; ++i) p = step_master(p, w);
        std::vector<double> out_s(p.probs.size()), out_p(p.probs.size());
        const int reps = 50;
        const double ts = time_ms(reps, [&] { ref::apply_transition_banded(w, p.probs, out_s); });
        const double tp = time_ms(reps, [&] { apply_transition_banded(w, p.probs, out_p); });
        report("transition matvec", ts, tp,
               std::memcmp(out_s.data(), out_p.data(), out_s.size() * sizeof(double)) == 0);
    }

    // banded complex kick matvec
    {
        StateVector psi = StateVector::delta(params.basis_m, 0);
        psi = step_coherent(psi, system, b, CoherentPath::banded);
        std::vector<std::complex<double>> out_s(psi.amps.size()), out_p(psi.amps.size());
        const int reps = 50;
        const double ts = time_ms(reps, [&] { ref::apply_kick_banded(b, psi.amps, out_s); });
        const double tp = time_ms(reps, [&] { apply_kick_banded(b, psi.amps, out_p); });
        report("kick matvec", ts, tp,
               std::memcmp(out_s.data(), out_p.data(),
                           out_s.size() * sizeof(std::complex<double>)) == 0);
    }

    // classical ensemble sweep
    {
        SystemParams cp;
        cp.lambda = 2.0;
        cp.basis_m = 4;
        const KickedSystem csys = build_system(cp);
        const int kicks = 200;
        auto e1 = ClassicalEnsemble::uniform_angles(100000, 0.0, 7);
        auto e2 = e1;
        double ts = 0, tp = 0;
        MomentSeries s1, s2;
        ts = time_ms(1, [&] { s1 = ref::run_ensemble(csys, e1, kicks, ClassicalMode::twist); });
        tp = time_ms(1, [&] { s2 = run_ensemble(csys, e2, kicks, ClassicalMode::twist); });
        bool same = s1.mean.size() == s2.mean.size();
        for (std::size_t i = 0; same && i < s1.mean.size(); ++i)
            same = std::memcmp(&s1.mean[i], &s2.mean[i], sizeof(MomentRecord)) == 0 &&
                   std::memcmp(&s1.se[i], &s2.se[i], sizeof(MomentRecord)) == 0;
        report("twist ensemble sweep", ts, tp, same);
    }

    // blocked reduction
    {
        std::vector<double> v(1 << 22);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
        double a = 0, bsum = 0;
        const int reps = 20;
        const double ts = time_ms(reps, [&] { a = ref::blocked_sum(std::span<const double>(v)); });
        const double tp = time_ms(reps, [&] { bsum = blocked_sum(std::span<const double>(v)); });
        report("blocked reduction", ts, tp, std::memcmp(&a, &bsum, sizeof(double)) == 0);
    }
    return 0;
}
