#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kdiff {

// Fixed-block pairwise summation. The block decomposition depends only on the
// input length and blocks are combined in index order, so the result is
// bitwise identical regardless of how many threads execute the block loop.
inline constexpr std::size_t kReduceBlock = 2048;

namespace detail {
template <class F>
double sum_block(std::size_t lo, std::size_t hi, F&& value) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += value(i);
    return s;
}
} // namespace detail

/// Deterministic sum of value(i) for i in [0, n); block loop runs under OpenMP.
template <class F>
double blocked_sum(std::size_t n, F&& value) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        partial[static_cast<std::size_t>(b)] = detail::sum_block(lo, hi, value);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double blocked_sum(std::span<const double> v);

namespace ref {

/// Serial reference for the block reduction; must agree bitwise with the
/// parallel version.
template <class F>
double blocked_sum(std::size_t n, F&& value) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    double s = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        s += detail::sum_block(lo, hi, value);
    }
    return s;
}

double blocked_sum(std::span<const double> v);

} // namespace ref
} // namespace kdiff
