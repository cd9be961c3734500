#pragma once

#include <optional>
#include <vector>

#include "kdiff/potential.hpp"

namespace kdiff {

/// Free Hamiltonian H0(p). The rotator form evaluates exactly to p^2/(2 I);
/// polynomial coefficients are in ascending powers of p; tabulated values live
/// on the lattice p_n = n*hbar and only support lattice lookups.
struct FreeHamiltonian {
    enum class Kind { rotator, polynomial, tabulated };

    Kind kind = Kind::rotator;
    double inertia = 1.0;
    std::vector<double> coefficients; // polynom in p, ascending
    std::vector<double> table;        // H0(p_n), n in [-M, M]

    static FreeHamiltonian rotator(double inertia);
    static FreeHamiltonian polynomial(std::vector<double> coefficients);
    static FreeHamiltonian tabulated(std::vector<double> values);

    double value(double p) const;      // tabulated kind -> InvariantError
    double derivative(double p) const; // tabulated kind -> InvariantError
    bool has_derivative() const { return kind != Kind::tabulated; }
    /// Mass for kinetic-energy bookkeeping, if this H0 declares one (rotator
    /// inertia, or polynomial with a pure p^2/2m term).
    std::optional<double> mass() const;
};

struct SystemParams {
    FreeHamiltonian h0 = FreeHamiltonian::rotator(1.0);
    Potential v = Potential::cosine();
    double lambda = 1.0;   // kick strength
    double period_t = 1.0; // kick period T
    double tau = 0.5;      // measurement offset, 0 < tau < T
    double hbar = 1.0;
    int basis_m = 256; // momentum indices n in [-M, M]
    int grid_g = 0;    // angle grid size; 0 -> smallest power of two >= 4M+1
};

/// Full physical description of the kicked system, shared by every module.
/// Immutable after construction and safe to share across threads.
struct KickedSystem {
    FreeHamiltonian h0;
    Potential v;
    double lambda;
    double period_t;
    double tau;
    double hbar;
    int basis_m;
    int grid_g;

    int dim() const { return 2 * basis_m + 1; }
    double momentum(int n) const { return n * hbar; }
    double h0_at(int n) const; // H0(p_n), honoring tabulated kinds

    static int min_grid(int basis_m) { return 4 * basis_m + 1; }
};

/// Validates all parameter ranges (throws ConfigError naming the field and
/// bound) and resolves the derived quantities.
KickedSystem build_system(const SystemParams& params);

} // namespace kdiff
