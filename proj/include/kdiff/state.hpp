#pragma once

#include <complex>
#include <vector>

namespace kdiff {

/// Occupation probabilities P_n on the truncated momentum lattice p_n = n*hbar,
/// n in [-M, M]. Probability scattered outside the truncation is accumulated
/// in `leak`, never renormalized away, so sum(probs) + leak stays 1.
struct MomentumDistribution {
    int basis_m = 0;
    std::vector<double> probs; // index n + basis_m
    double leak = 0.0;

    double& at(int n) { return probs[static_cast<std::size_t>(n + basis_m)]; }
    double at(int n) const { return probs[static_cast<std::size_t>(n + basis_m)]; }
    int dim() const { return 2 * basis_m + 1; }

    double sum() const;

    static MomentumDistribution zero(int basis_m);
    static MomentumDistribution delta(int basis_m, int n0);

    /// Throws InvariantError unless entries are >= -tol and sum + leak = 1
    /// within tol.
    void check(double tol = 1e-12) const;
};

/// Pure state in the momentum basis. Norm deficits introduced by truncation
/// are reported through `leak`; amplitudes are never silently renormalized.
struct StateVector {
    int basis_m = 0;
    std::vector<std::complex<double>> amps; // index n + basis_m
    double leak = 0.0;

    std::complex<double>& at(int n) { return amps[static_cast<std::size_t>(n + basis_m)]; }
    std::complex<double> at(int n) const { return amps[static_cast<std::size_t>(n + basis_m)]; }
    int dim() const { return 2 * basis_m + 1; }

    double norm2() const;

    static StateVector delta(int basis_m, int n0);

    MomentumDistribution to_distribution() const;
};

} // namespace kdiff
