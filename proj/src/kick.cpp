#include "kdiff/kick.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "kdiff/errors.hpp"
#include "kdiff/fft.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

namespace {
constexpr double kPi = std::numbers::pi;
}

double KickMatrix::column_norm2(int m) const {
    const int mm = basis_m;
    return blocked_sum(static_cast<std::size_t>(2 * mm + 1), [&](std::size_t i) {
        const int n = static_cast<int>(i) - mm;
        return std::norm(entry(n, m));
    });
}

KickMatrix kick_matrix(const KickedSystem& system) {
    const int g = system.grid_g;
    const int m2 = 2 * system.basis_m;
    const double z = system.lambda / system.hbar;

    // Kick factor on the canonical angle grid.
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(g));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g; ++j) {
        const double x = -kPi + 2.0 * kPi * j / g;
        const double arg = -z * system.v.value(x);
        phase[static_cast<std::size_t>(j)] = {std::cos(arg), std::sin(arg)};
    }

    std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(g));
    fft_forward(phase, spectrum);

    // b_d = (1/2pi) Int e^{-i d x} e^{-i z V(x)} dx on the shifted grid picks
    // up a (-1)^d from x_0 = -pi.
    KickMatrix b;
    b.basis_m = system.basis_m;
    b.lambda_over_hbar = z;
    b.potential_id = system.v.id();
    b.coef.resize(static_cast<std::size_t>(2 * m2 + 1));
    const double inv_g = 1.0 / g;
    for (int d = -m2; d <= m2; ++d) {
        const int idx = d >= 0 ? d : d + g;
        const double parity = (d % 2 == 0) ? 1.0 : -1.0;
        b.coef[static_cast<std::size_t>(d + m2)] =
            parity * inv_g * spectrum[static_cast<std::size_t>(idx)];
    }

    int bw = 0;
    for (int d = m2; d >= 1; --d) {
        if (std::abs(b.stencil(d)) >= kAmplitudeFloor || std::abs(b.stencil(-d)) >= kAmplitudeFloor) {
            bw = d;
            break;
        }
    }
    b.bandwidth = bw;
    // Quadrature non-convergence is a warning recorded in the metadata, not a
    // fatal error: downstream leak accounting keeps it visible.
    b.bandwidth_converged = bw < m2;
    return b;
}

TransitionMatrix transition_matrix(const KickMatrix& b) {
    const int mm = b.basis_m;
    const int m2 = 2 * mm;
    TransitionMatrix w;
    w.basis_m = mm;
    w.bandwidth = b.bandwidth;
    w.coef.resize(b.coef.size());
    for (std::size_t i = 0; i < b.coef.size(); ++i) w.coef[i] = std::norm(b.coef[i]);

    const int dim = 2 * mm + 1;
    w.column_leak.resize(static_cast<std::size_t>(dim));
    w.row_leak.resize(static_cast<std::size_t>(dim));
#pragma omp parallel for schedule(static)
    for (int m = -mm; m <= mm; ++m) {
        double colsum = 0.0;
        double rowsum = 0.0;
        for (int n = -mm; n <= mm; ++n) {
            colsum += w.coef[static_cast<std::size_t>(n - m + m2)];
            rowsum += w.coef[static_cast<std::size_t>(m - n + m2)];
        }
        w.column_leak[static_cast<std::size_t>(m + mm)] = 1.0 - colsum;
        w.row_leak[static_cast<std::size_t>(m + mm)] = 1.0 - rowsum;
    }
    return w;
}

void dump_transition_matrix(const TransitionMatrix& w, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little,
                  "dump format is little-endian; bigendian hosts need byte swaps");
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw InvariantError("cannot open " + path.string() + " for writing");
    const char magic[8] = {'K', 'D', 'I', 'F', 'F', 'W', '1', '\0'};
    const std::uint32_t m = static_cast<std::uint32_t>(w.basis_m);
    const std::uint32_t bw = static_cast<std::uint32_t>(w.bandwidth);
    std::fwrite(magic, 1, 8, f);
    std::fwrite(&m, 4, 1, f);
    std::fwrite(&bw, 4, 1, f);
    const int mm = w.basis_m;
    std::vector<double> row(static_cast<std::size_t>(w.dim()));
    for (int n = -mm; n <= mm; ++n) {
        for (int col = -mm; col <= mm; ++col)
            row[static_cast<std::size_t>(col + mm)] = w.entry(n, col);
        std::fwrite(row.data(), sizeof(double), row.size(), f);
    }
    std::fclose(f);
}

} // namespace kdiff
