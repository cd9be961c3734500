#include "kdiff/observables.hpp"

#include <cmath>
#include <string>

#include "kdiff/errors.hpp"
#include "kdiff/propagate.hpp"
#include "kdiff/reduce.hpp"

namespace kdiff {

DistributionMoments moments_from_distribution(const MomentumDistribution& p, double hbar,
                                              int max_order) {
    if (max_order < 1 || max_order > 4)
        throw InvariantError("moments_from_distribution supports orders 1..4");
    DistributionMoments out;
    const int mm = p.basis_m;
    const double edge = mm * hbar;
    double edge_k = 1.0;
    for (int k = 1; k <= max_order; ++k) {
        const double mk = blocked_sum(p.probs.size(), [&](std::size_t i) {
            const double pn = (static_cast<int>(i) - mm) * hbar;
            double v = pn;
            for (int j = 1; j < k; ++j) v *= pn;
            return v * p.probs[i];
        });
        edge_k *= edge;
        out.leak_bound[static_cast<std::size_t>(k - 1)] = p.leak * edge_k;
        switch (k) {
        case 1: out.m.m1 = mk; break;
        case 2: out.m.m2 = mk; break;
        case 3: out.m.m3 = mk; break;
        default: out.m.m4 = mk; break;
        }
    }
    return out;
}

namespace {

struct LineFit {
    double slope;
    double intercept;
    double residual; // max |fit - data|
};

template <class Y>
LineFit least_squares(double period_t, Window w, Y&& y) {
    const int n = w.length();
    const double tbar = 0.5 * (w.lo + w.hi) * period_t;
    double ybar = 0.0;
    for (int k = w.lo; k <= w.hi; ++k) ybar += y(k);
    ybar /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int k = w.lo; k <= w.hi; ++k) {
        const double dx = k * period_t - tbar;
        sxy += dx * (y(k) - ybar);
        sxx += dx * dx;
    }
    LineFit fit{};
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * tbar;
    fit.residual = 0.0;
    for (int k = w.lo; k <= w.hi; ++k) {
        const double err = std::abs(fit.intercept + fit.slope * k * period_t - y(k));
        fit.residual = std::max(fit.residual, err);
    }
    return fit;
}

void check_window(const MomentSeries& series, Window w) {
    if (w.length() < 3)
        throw InvariantError("fit window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                             "] is degenerate; need at least 3 points");
    if (w.lo < 0 || w.hi > series.kicks())
        throw InvariantError("fit window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                             "] outside recorded series 0.." + std::to_string(series.kicks()));
}

} // namespace

DiffusionFit fit_diffusion(const MomentSeries& series, double period_t, Window window) {
    check_window(series, window);
    const auto mean_p = [&](int k) { return series.mean[static_cast<std::size_t>(k)].m1; };
    const auto var_p = [&](int k) {
        const auto& r = series.mean[static_cast<std::size_t>(k)];
        return r.m2 - r.m1 * r.m1;
    };
    const LineFit f = least_squares(period_t, window, mean_p);
    const LineFit d = least_squares(period_t, window, var_p);
    DiffusionFit out;
    out.friction = f.slope;
    out.friction_residual = f.residual;
    out.diffusion = d.slope;
    out.residual = d.residual;
    out.window = window;
    return out;
}

double heating_rate(const MomentSeries& series, const KickedSystem& system, Window window,
                    std::optional<double> mass) {
    check_window(series, window);
    if (!mass) mass = system.h0.mass();
    if (!mass)
        throw InvariantError("heating_rate: H0 does not declare a mass; pass one explicitly");
    const LineFit fit = least_squares(system.period_t, window, [&](int k) {
        return series.mean[static_cast<std::size_t>(k)].m2;
    });
    return fit.slope / (2.0 * *mass);
}

std::vector<double> fourth_moment_discrepancy(const MeasuredRun& quantum,
                                              const MomentSeries& classical_exact,
                                              const KickedSystem& system) {
    const MomentSeries& q = quantum.moments;
    const int kicks = std::min(q.kicks(), classical_exact.kicks());
    if (kicks < 1) throw InvariantError("fourth_moment_discrepancy: need at least one kick");

    // The run must belong to the system it is compared under: its exact
    // variance growth per kick is lambda^2 <f^2>.
    const double rate = system.lambda * system.lambda *
                        mean_force_squared(system.v, system.grid_g);
    const double dm2 = q.mean[1].m2 - q.mean[0].m2 -
                       (2.0 * q.mean[0].m1 * (q.mean[1].m1 - q.mean[0].m1));
    if (std::abs(dm2 - rate) > 1e-6 * std::max(1.0, rate))
        throw InvariantError("fourth_moment_discrepancy: quantum run does not match the system "
                             "parameters (variance increment " +
                             std::to_string(dm2) + " vs expected " + std::to_string(rate) + ")");

    const auto& q0 = q.mean[0];
    const auto& c0 = classical_exact.mean[0];
    const double scale0 = std::max({1.0, std::abs(q0.m4), std::abs(c0.m4)});
    if (std::abs(q0.m1 - c0.m1) > 1e-9 || std::abs(q0.m2 - c0.m2) > 1e-9 ||
        std::abs(q0.m3 - c0.m3) > 1e-9 || std::abs(q0.m4 - c0.m4) > 1e-9 * scale0)
        throw InvariantError("fourth_moment_discrepancy: initial moments not matched");

    // The comparison is only meaningful while the two maps track each other
    // through third order; enforce that prerequisite per kick.
    std::vector<double> out(static_cast<std::size_t>(kicks));
    for (int k = 1; k <= kicks; ++k) {
        const auto& qa = q.mean[static_cast<std::size_t>(k - 1)];
        const auto& qb = q.mean[static_cast<std::size_t>(k)];
        const auto& ca = classical_exact.mean[static_cast<std::size_t>(k - 1)];
        const auto& cb = classical_exact.mean[static_cast<std::size_t>(k)];
        const double d1 = (qb.m1 - qa.m1) - (cb.m1 - ca.m1);
        const double d2 = (qb.m2 - qa.m2) - (cb.m2 - ca.m2);
        const double d3 = (qb.m3 - qa.m3) - (cb.m3 - ca.m3);
        if (std::abs(d1) > 1e-9 || std::abs(d2) > 1e-9 || std::abs(d3) > 1e-9)
            throw InvariantError(
                "fourth_moment_discrepancy: order 1-3 increments diverge at kick " +
                std::to_string(k) + "; inputs are not a matched pair");
        out[static_cast<std::size_t>(k - 1)] = (qb.m4 - qa.m4) - (cb.m4 - ca.m4);
    }
    return out;
}

} // namespace kdiff
