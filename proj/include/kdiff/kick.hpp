#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "kdiff/system.hpp"

namespace kdiff {

/// Matrix elements below this magnitude count as zero for bandwidth and
/// branch-pruning purposes.
inline constexpr double kAmplitudeFloor = 1e-14;

/// Unitary kick matrix B_nm = <n| exp(-i lambda V / hbar) |m> on the truncated
/// basis. For any V(x) the matrix is Toeplitz, so only the stencil
/// b_d = B_{n, n-d} for d in [-2M, 2M] is stored; it is computed with a single
/// length-G transform of the kick factor, not M^2 integrals.
struct KickMatrix {
    int basis_m = 0;
    double lambda_over_hbar = 0.0;
    std::string potential_id;
    int bandwidth = 0;               // smallest b with |b_d| < floor for all |d| > b
    bool bandwidth_converged = true; // false: tail still above floor at |d| = 2M
    std::vector<std::complex<double>> coef; // stencil, index d + 2M

    std::complex<double> stencil(int d) const {
        return coef[static_cast<std::size_t>(d + 2 * basis_m)];
    }
    std::complex<double> entry(int n, int m) const { return stencil(n - m); }
    double column_norm2(int m) const;
};

/// Transition probabilities W_nm = |B_nm|^2 driving the master equation,
/// independent of tau and of H0. Stored as the Toeplitz stencil plus explicit
/// per-column / per-row truncation leak.
struct TransitionMatrix {
    int basis_m = 0;
    int bandwidth = 0;
    std::vector<double> coef;        // w_d = |b_d|^2, index d + 2M
    std::vector<double> column_leak; // index m + M
    std::vector<double> row_leak;    // index n + M

    double stencil(int d) const { return coef[static_cast<std::size_t>(d + 2 * basis_m)]; }
    double entry(int n, int m) const { return stencil(n - m); }
    int dim() const { return 2 * basis_m + 1; }
};

KickMatrix kick_matrix(const KickedSystem& system);
TransitionMatrix transition_matrix(const KickMatrix& b);

/// Binary dump of the dense W for inspection: 16-byte header (8-byte magic
/// "KDIFFW1\0", uint32 M, uint32 bandwidth), then (2M+1)^2 row-major
/// little-endian doubles.
void dump_transition_matrix(const TransitionMatrix& w, const std::filesystem::path& path);

} // namespace kdiff
