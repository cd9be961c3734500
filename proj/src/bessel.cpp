#include "kdiff/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace kdiff {
namespace {

// Power series around x = 0; used where the alternating terms cannot grow
// (x <= 3), so there is no cancellation.
double series_j(int n, double x) {
    double prefix = 1.0;
    for (int j = 1; j <= n; ++j) prefix *= 0.5 * x / j;
    const double q = 0.25 * x * x;
    double term = prefix;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Miller's normalized downward recurrence, J_{k-1} = (2k/x) J_k - J_{k+1},
// scaled by the sum rule J_0 + 2 sum_{k even >= 2} J_k = 1.
double miller_j(int n, double x) {
    const int base = std::max(n, static_cast<int>(std::ceil(x)));
    int start = base + 50 + static_cast<int>(std::ceil(1.5 * std::sqrt(static_cast<double>(base))));
    if (start % 2 != 0) ++start;

    double above = 0.0;     // J_{k+1} candidate
    double here = 1e-30;    // J_k candidate, k = start
    double norm = 0.0;
    double target = 0.0;
    if (start % 2 == 0) norm += 2.0 * here;

    for (int k = start; k > 0; --k) {
        const double below = (2.0 * k / x) * here - above;
        above = here;
        here = below;
        const int idx = k - 1;
        if (std::abs(here) > 1e250) {
            here *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
        if (idx == n) target = here;
        if (idx == 0)
            norm += here;
        else if (idx % 2 == 0)
            norm += 2.0 * here;
    }
    return target / norm;
}

} // namespace

double bessel_j(int order, double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_j: argument must be finite");
    if (std::abs(x) > 2000.0)
        throw std::domain_error("bessel_j: |argument| > 2000 is outside the stable range");
    if (std::abs(order) > 100000)
        throw std::domain_error("bessel_j: |order| > 100000 is outside the stable range");

    double sign = 1.0;
    int n = order;
    if (n < 0) {
        n = -n;
        if (n % 2 != 0) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (n % 2 != 0) sign = -sign;
    }
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 3.0 && n <= 200) return sign * series_j(n, x);
    return sign * miller_j(n, x);
}

} // namespace kdiff
