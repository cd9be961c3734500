#include "kdiff/branches.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdiff/errors.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

double BranchState::total_probability() const {
    return blocked_sum(amplitude.size(), [&](std::size_t i) { return std::norm(amplitude[i]); });
}

namespace {

std::complex<double> free_phase(const KickedSystem& system, int n, double t) {
    const double arg = -system.h0_at(n) * t / system.hbar;
    return {std::cos(arg), std::sin(arg)};
}

} // namespace

BranchState init_branches(const StateVector& c0, const KickedSystem& system) {
    if (c0.basis_m != system.basis_m) throw InvariantError("init_branches: basis mismatch");
    const double n2 = c0.norm2();
    if (std::abs(n2 - 1.0) > 1e-9)
        throw InvariantError("init_branches: initial state norm^2 = " + std::to_string(n2) +
                             " is not 1");
    BranchState state;
    state.basis_m = system.basis_m;
    state.kicks = 0;
    state.phase_exponent = 1; // the first register flip contributes one factor of -i
    for (int m = -system.basis_m; m <= system.basis_m; ++m) {
        const std::complex<double> c = c0.at(m);
        if (c == std::complex<double>{0.0, 0.0}) continue;
        state.amplitude.push_back(c * free_phase(system, m, system.tau));
        state.paths.push_back(m);
    }
    return state;
}

void kick_branches(BranchState& state, const KickedSystem& system, const KickMatrix& b,
                   std::size_t budget) {
    if (state.basis_m != b.basis_m || state.basis_m != system.basis_m)
        throw InvariantError("kick_branches: basis mismatch");
    const int mm = state.basis_m;
    const int bw = b.bandwidth;
    const std::size_t fanout = 2 * static_cast<std::size_t>(bw) + 1;
    const int next_kick = state.kicks + 1;
    if (state.count() * fanout > budget)
        throw BudgetError("kick_branches: branch budget " + std::to_string(budget) +
                              " exceeded at kick " + std::to_string(next_kick) + " (" +
                              std::to_string(state.count()) + " parents, fanout " +
                              std::to_string(fanout) + ")",
                          next_kick);

    // Dressed amplitude A_lm = e^{-i H0(p_l) tau/hbar} b_{l-m} e^{-i H0(p_m)(T-tau)/hbar}.
    std::vector<std::complex<double>> phase_tau(static_cast<std::size_t>(state.basis_m) * 2 + 1);
    std::vector<std::complex<double>> phase_rest(phase_tau.size());
    for (int n = -mm; n <= mm; ++n) {
        phase_tau[static_cast<std::size_t>(n + mm)] = free_phase(system, n, system.tau);
        phase_rest[static_cast<std::size_t>(n + mm)] =
            free_phase(system, n, system.period_t - system.tau);
    }

    const std::size_t parents = state.count();
    const std::size_t old_len = static_cast<std::size_t>(state.kicks) + 1;
    const std::size_t new_len = old_len + 1;

    // Pass 1: count surviving children per parent (fixed order, so offsets and
    // output layout do not depend on scheduling).
    std::vector<std::size_t> child_count(parents, 0);
    std::vector<double> lost(parents, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ip = 0; ip < static_cast<long long>(parents); ++ip) {
        const std::size_t i = static_cast<std::size_t>(ip);
        const int m = state.tip(i);
        const std::complex<double> parent =
            state.amplitude[i] * phase_rest[static_cast<std::size_t>(m + mm)];
        const double parent_p = std::norm(state.amplitude[i]);
        const int lo = std::max(-mm, m - bw);
        const int hi = std::min(mm, m + bw);
        std::size_t cnt = 0;
        double kept = 0.0;
        for (int l = lo; l <= hi; ++l) {
            const std::complex<double> amp = parent * b.stencil(l - m);
            if (std::abs(amp) >= kAmplitudeFloor) {
                ++cnt;
                kept += std::norm(amp);
            }
        }
        child_count[i] = cnt;
        lost[i] = parent_p - kept; // truncation outside the window plus pruned children
    }

    std::vector<std::size_t> offset(parents + 1, 0);
    for (std::size_t i = 0; i < parents; ++i) offset[i + 1] = offset[i] + child_count[i];
    const std::size_t total = offset[parents];

    std::vector<std::complex<double>> new_amp(total);
    std::vector<std::int32_t> new_paths(total * new_len);

#pragma omp parallel for schedule(static)
    for (long long ip = 0; ip < static_cast<long long>(parents); ++ip) {
        const std::size_t i = static_cast<std::size_t>(ip);
        const int m = state.tip(i);
        const std::complex<double> parent =
            state.amplitude[i] * phase_rest[static_cast<std::size_t>(m + mm)];
        const int lo = std::max(-mm, m - bw);
        const int hi = std::min(mm, m + bw);
        std::size_t at = offset[i];
        for (int l = lo; l <= hi; ++l) {
            std::complex<double> amp = parent * b.stencil(l - m);
            if (std::abs(amp) < kAmplitudeFloor) continue;
            amp *= phase_tau[static_cast<std::size_t>(l + mm)];
            new_amp[at] = amp;
            std::int32_t* dst = new_paths.data() + at * new_len;
            const std::int32_t* src = state.paths.data() + i * old_len;
            std::copy(src, src + old_len, dst);
            dst[old_len] = l;
            ++at;
        }
    }

    double lost_total = 0.0;
    for (double v : lost) lost_total += v;

    state.amplitude = std::move(new_amp);
    state.paths = std::move(new_paths);
    state.kicks = next_kick;
    state.phase_exponent += 1;
    state.leak += lost_total;
}

MomentumDistribution branch_occupation(const BranchState& state) {
    MomentumDistribution p = MomentumDistribution::zero(state.basis_m);
    // Serial accumulation in branch order; cross terms between different paths
    // vanish exactly, so this is a plain histogram of |amp|^2.
    for (std::size_t i = 0; i < state.count(); ++i)
        p.at(state.tip(i)) += std::norm(state.amplitude[i]);
    p.leak = state.leak;
    return p;
}

} // namespace kdiff
