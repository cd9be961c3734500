#include "kdiff/potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kdiff/errors.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

namespace {
constexpr double kPi = std::numbers::pi;
}

Potential Potential::zero() {
    Potential v;
    v.a_ = {0.0};
    v.id_ = "zero";
    return v;
}

Potential Potential::cosine() {
    Potential v;
    v.a_ = {0.0, 1.0};
    v.id_ = "cosine";
    return v;
}

Potential Potential::cosine_sum(std::vector<Harmonic> harmonics) {
    if (harmonics.empty()) throw InvariantError("cosine_sum: empty harmonic list");
    int kmax = 0;
    for (const auto& h : harmonics) {
        if (h.k < 1) throw InvariantError("cosine_sum: harmonic index must be >= 1");
        if (!std::isfinite(h.weight)) throw InvariantError("cosine_sum: non-finite weight");
        kmax = std::max(kmax, h.k);
    }
    Potential v;
    v.a_.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (const auto& h : harmonics) v.a_[static_cast<std::size_t>(h.k)] += h.weight;
    std::ostringstream id;
    id << "cosine_sum(";
    for (std::size_t i = 0; i < harmonics.size(); ++i) {
        if (i) id << ",";
        id << harmonics[i].k << ":" << harmonics[i].weight;
    }
    id << ")";
    v.id_ = id.str();
    return v;
}

Potential Potential::sampled(std::vector<double> values) {
    const int s = static_cast<int>(values.size());
    if (s < 3) throw InvariantError("sampled potential needs at least 3 grid values");
    for (double y : values)
        if (!std::isfinite(y)) throw InvariantError("sampled potential has non-finite value");

    // Real trigonometric coefficients up to k = (S-1)/2; an even-S Nyquist
    // component has no well-defined spectral derivative and is dropped.
    const int kmax = (s - 1) / 2;
    Potential v;
    v.a_.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    v.b_.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double ca = 0.0, cb = 0.0;
        for (int j = 0; j < s; ++j) {
            const double x = -kPi + 2.0 * kPi * j / s;
            ca += values[static_cast<std::size_t>(j)] * std::cos(k * x);
            cb += values[static_cast<std::size_t>(j)] * std::sin(k * x);
        }
        const double scale = (k == 0 ? 1.0 : 2.0) / s;
        v.a_[static_cast<std::size_t>(k)] = scale * ca;
        v.b_[static_cast<std::size_t>(k)] = scale * cb;
    }
    v.b_[0] = 0.0;
    v.id_ = "sampled(" + std::to_string(s) + ")";
    return v;
}

double Potential::value(double x) const {
    double s = a_[0];
    for (std::size_t k = 1; k < a_.size(); ++k) {
        s += a_[k] * std::cos(static_cast<double>(k) * x);
        if (!b_.empty()) s += b_[k] * std::sin(static_cast<double>(k) * x);
    }
    return s;
}

double Potential::force(double x) const {
    // f = -V' = sum_k k * (a_k sin kx - b_k cos kx)
    double s = 0.0;
    for (std::size_t k = 1; k < a_.size(); ++k) {
        const double kk = static_cast<double>(k);
        s += kk * a_[k] * std::sin(kk * x);
        if (!b_.empty()) s -= kk * b_[k] * std::cos(kk * x);
    }
    return s;
}

double Potential::force_deriv(double x) const {
    // f' = sum_k k^2 * (a_k cos kx + b_k sin kx)
    double s = 0.0;
    for (std::size_t k = 1; k < a_.size(); ++k) {
        const double kk = static_cast<double>(k);
        s += kk * kk * a_[k] * std::cos(kk * x);
        if (!b_.empty()) s += kk * kk * b_[k] * std::sin(kk * x);
    }
    return s;
}

namespace {

template <class F>
double angle_average(int grid_g, F&& fn) {
    if (grid_g < 3) throw InvariantError("angle average needs at least 3 grid points");
    const double inv = 1.0 / grid_g;
    return inv * blocked_sum(static_cast<std::size_t>(grid_g), [&](std::size_t j) {
               const double x = -kPi + 2.0 * kPi * static_cast<double>(j) * inv;
               return fn(x);
           });
}

} // namespace

double mean_force_squared(const Potential& v, int grid_g) {
    return angle_average(grid_g, [&](double x) {
        const double f = v.force(x);
        return f * f;
    });
}

double mean_force_deriv_squared(const Potential& v, int grid_g) {
    return angle_average(grid_g, [&](double x) {
        const double fp = v.force_deriv(x);
        return fp * fp;
    });
}

double mean_force_power(const Potential& v, int grid_g, int k) {
    if (k < 1 || k > 4) throw InvariantError("mean_force_power supports orders 1..4");
    return angle_average(grid_g, [&](double x) {
        const double f = v.force(x);
        double r = f;
        for (int i = 1; i < k; ++i) r *= f;
        return r;
    });
}

} // namespace kdiff
