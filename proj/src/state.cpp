#include "kdiff/state.hpp"

#include <cmath>
#include <string>

#include "kdiff/errors.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

double MomentumDistribution::sum() const {
    return blocked_sum(std::span<const double>(probs));
}

MomentumDistribution MomentumDistribution::zero(int basis_m) {
    MomentumDistribution p;
    p.basis_m = basis_m;
    p.probs.assign(static_cast<std::size_t>(2 * basis_m + 1), 0.0);
    return p;
}

MomentumDistribution MomentumDistribution::delta(int basis_m, int n0) {
    if (n0 < -basis_m || n0 > basis_m)
        throw InvariantError("delta distribution index " + std::to_string(n0) +
                             " outside basis [-" + std::to_string(basis_m) + ", " +
                             std::to_string(basis_m) + "]");
    MomentumDistribution p = zero(basis_m);
    p.at(n0) = 1.0;
    return p;
}

void MomentumDistribution::check(double tol) const {
    for (double v : probs)
        if (!(v >= -tol))
            throw InvariantError("momentum distribution has negative entry " + std::to_string(v));
    const double total = sum() + leak;
    if (std::abs(total - 1.0) > tol)
        throw InvariantError("momentum distribution sum + leak deviates from 1 by " +
                             std::to_string(total - 1.0));
}

double StateVector::norm2() const {
    return blocked_sum(amps.size(), [&](std::size_t i) { return std::norm(amps[i]); });
}

StateVector StateVector::delta(int basis_m, int n0) {
    if (n0 < -basis_m || n0 > basis_m)
        throw InvariantError("delta state index outside basis");
    StateVector s;
    s.basis_m = basis_m;
    s.amps.assign(static_cast<std::size_t>(2 * basis_m + 1), {0.0, 0.0});
    s.at(n0) = {1.0, 0.0};
    return s;
}

MomentumDistribution StateVector::to_distribution() const {
    MomentumDistribution p = MomentumDistribution::zero(basis_m);
    for (std::size_t i = 0; i < amps.size(); ++i) p.probs[i] = std::norm(amps[i]);
    p.leak = leak;
    return p;
}

} // namespace kdiff
