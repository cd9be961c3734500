#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kdiff/kick.hpp"
#include "kdiff/state.hpp"
#include "kdiff/system.hpp"

namespace kdiff {

/// Path tree realizing the unitary spin-register measurement model. Each
/// branch is one sequence of momentum indices (m_0, m_1, ..., m_N); the spin
/// registers are never materialized, because a path uniquely labels which
/// registers are flipped and distinct paths are therefore exactly orthogonal.
/// Amplitudes carry the full dressed transition factors; a common power of
/// (-i) is tracked separately as an integer exponent.
struct BranchState {
    int basis_m = 0;
    int kicks = 0;          // path length is kicks + 1
    int phase_exponent = 0; // global factor (-i)^phase_exponent
    std::vector<std::complex<double>> amplitude;
    std::vector<std::int32_t> paths; // flat, branch b at [b*(kicks+1), (b+1)*(kicks+1))
    double leak = 0.0;               // pruned + truncated probability

    std::size_t count() const { return amplitude.size(); }
    std::span<const std::int32_t> path(std::size_t b) const {
        const std::size_t len = static_cast<std::size_t>(kicks) + 1;
        return {paths.data() + b * len, len};
    }
    int tip(std::size_t b) const { return path(b)[static_cast<std::size_t>(kicks)]; }

    double total_probability() const;
};

/// Prepares one branch per nonzero amplitude of c0, dressed with the
/// free-evolution phase accumulated up to the first measurement coupling.
BranchState init_branches(const StateVector& c0, const KickedSystem& system);

/// Advances the model by one kick: every branch spawns children over the kick
/// band with dressed amplitudes; children below the amplitude floor are pruned
/// into the leak. Throws BudgetError (naming the kick) if the expansion would
/// exceed `budget` branches -- this model is exponential by design and serves
/// as a verification instrument, not a production propagator.
void kick_branches(BranchState& state, const KickedSystem& system, const KickMatrix& b,
                   std::size_t budget = 10'000'000);

/// Occupation probabilities P_n = sum over branches ending at n of |amp|^2.
/// No interference sum appears: distinct paths label orthogonal register
/// configurations.
MomentumDistribution branch_occupation(const BranchState& state);

} // namespace kdiff
