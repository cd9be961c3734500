#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include <omp.h>

#include "kdiff/classical.hpp"
#include "kdiff/errors.hpp"
#include "kdiff/observables.hpp"
#include "oracles.hpp"

using namespace kdiff;

namespace {

KickedSystem rotator_system(double lambda, double period = 1.0, double inertia = 1.0) {
    SystemParams p;
    p.h0 = FreeHamiltonian::rotator(inertia);
    p.lambda = lambda;
    p.period_t = period;
    p.basis_m = 4; // the classical maps never touch the quantum basis
    return build_system(p);
}

bool series_equal(const MomentSeries& a, const MomentSeries& b) {
    if (a.mean.size() != b.mean.size()) return false;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        if (std::memcmp(&a.mean[i], &b.mean[i], sizeof(MomentRecord)) != 0) return false;
        if (std::memcmp(&a.se[i], &b.se[i], sizeof(MomentRecord)) != 0) return false;
    }
    return true;
}

} // namespace

TEST_CASE("twist step: free rotation at lambda = 0") {
    const auto sys = rotator_system(0.0);
    const auto next = step_twist({0.0, 1.0}, sys);
    CHECK(next.x == doctest::Approx(1.0));
    CHECK(next.p == 1.0);
}

TEST_CASE("twist step: force vanishes at the potential minimum") {
    const auto sys = rotator_system(5.0);
    // drift lands exactly at x = 0 where V' = -sin 0 = 0
    const auto next = step_twist({-1.0, 1.0}, sys);
    CHECK(next.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(next.p == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("angles stay reduced to [-pi, pi)") {
    const auto sys = rotator_system(1.0);
    ClassicalState s{0.5, 7.3};
    for (int k = 0; k < 1000; ++k) {
        s = step_twist(s, sys);
        CHECK(s.x >= -oracle::kPi);
        CHECK(s.x < oracle::kPi);
    }
    CHECK(wrap_angle(oracle::kPi) == doctest::Approx(-oracle::kPi));
    CHECK(wrap_angle(-oracle::kPi) == doctest::Approx(-oracle::kPi));
    CHECK(wrap_angle(3.0 * oracle::kPi + 0.25) == doctest::Approx(-oracle::kPi + 0.25));
}

TEST_CASE("one twist step preserves phase-space area") {
    // finite-difference Jacobian determinant = 1 (the map is a shear pair)
    const auto check_at = [](const KickedSystem& sys, double x, double p) {
        const double h = 1e-6;
        const auto fxp = step_twist({x + h, p}, sys);
        const auto fxm = step_twist({x - h, p}, sys);
        const auto fpp = step_twist({x, p + h}, sys);
        const auto fpm = step_twist({x, p - h}, sys);
        const double dxdx = (fxp.x - fxm.x) / (2 * h);
        const double dpdx = (fxp.p - fxm.p) / (2 * h);
        const double dxdp = (fpp.x - fpm.x) / (2 * h);
        const double dpdp = (fpp.p - fpm.p) / (2 * h);
        return dxdx * dpdp - dxdp * dpdx;
    };
    const auto rot = rotator_system(0.7);
    CHECK(check_at(rot, 0.3, 0.7) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(check_at(rot, -1.1, 0.2) == doctest::Approx(1.0).epsilon(1e-8));

    SystemParams pp;
    pp.h0 = FreeHamiltonian::polynomial({0.0, 0.3, 0.5, 0.1});
    pp.lambda = 0.9;
    pp.basis_m = 4;
    const auto poly = build_system(pp);
    CHECK(check_at(poly, 0.4, -0.6) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("below the stochasticity threshold orbits stay bounded") {
    const auto sys = rotator_system(0.5); // K = 0.5
    double worst_early = 0.0;             // after 10^3 kicks
    double worst = 0.0;                   // after 10^4 kicks
    for (int ix = 0; ix < 12; ++ix) {
        for (int ip = 0; ip < 12; ++ip) {
            const double x0 = -oracle::kPi + (ix + 0.5) * 2.0 * oracle::kPi / 12;
            const double p0 = -oracle::kPi + (ip + 0.5) * 2.0 * oracle::kPi / 12;
            ClassicalState s{x0, p0};
            for (int k = 0; k < 10000; ++k) {
                s = step_twist(s, sys);
                if (k < 1000) worst_early = std::max(worst_early, std::abs(s.p - p0));
                worst = std::max(worst, std::abs(s.p - p0));
            }
        }
    }
    // librations inside the primary resonance swing |dp| by a few island
    // widths, but nothing grows: ten times more kicks adds nothing, and the
    // excursion stays far below the diffusive scale sqrt(N K^2/2) ~ 35
    CHECK(worst < 4.0);
    CHECK(worst <= worst_early + 0.5);
}

TEST_CASE("randomized step: lambda = 0 leaves p alone and draws x uniformly") {
    const auto sys = rotator_system(0.0);
    const CounterStream stream(31, 5);
    ClassicalState s{2.0, 1.5};
    double xsum = 0.0;
    const int n = 100000;
    for (int k = 1; k <= n; ++k) {
        s = step_randomized(s, sys, stream, static_cast<std::uint32_t>(k));
        CHECK(s.p == 1.5);
        xsum += s.x;
    }
    CHECK(std::abs(xsum / n) < 4.0 * oracle::kPi / std::sqrt(3.0 * n));
}

TEST_CASE("randomized step: single-kick increment statistics") {
    const auto sys = rotator_system(1.0);
    const int n = 1000000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const CounterStream stream(777, static_cast<std::uint64_t>(i));
        const auto next = step_randomized({0.0, 0.0}, sys, stream, 1);
        s1 += next.p;
        s2 += next.p * next.p;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    // mean increment vanishes; variance is lambda^2 <f^2> = 1/2
    const double sig_mean = std::sqrt(0.5 / n);
    CHECK(std::abs(mean) < 4.0 * sig_mean);
    const double sig_var = std::sqrt((0.375 - 0.25) / n); // Var(f^2) = <f^4> - <f^2>^2
    CHECK(std::abs(var - 0.5) < 4.0 * sig_var);
}

TEST_CASE("run_ensemble input validation") {
    const auto sys = rotator_system(1.0);
    ClassicalEnsemble empty;
    CHECK_THROWS_AS(run_ensemble(sys, empty, 10, ClassicalMode::twist), InvariantError);
    auto one = ClassicalEnsemble::uniform_angles(10, 0.0, 1);
    CHECK_THROWS_AS(run_ensemble(sys, one, 0, ClassicalMode::twist), InvariantError);

    SystemParams tp;
    tp.h0 = FreeHamiltonian::tabulated(std::vector<double>(9, 0.0));
    tp.basis_m = 4;
    const auto tab = build_system(tp);
    auto e = ClassicalEnsemble::uniform_angles(10, 0.0, 1);
    CHECK_THROWS_AS(run_ensemble(tab, e, 5, ClassicalMode::twist), InvariantError);
}

TEST_CASE("bitwise reproducibility across thread counts and vs the serial reference") {
    const auto sys = rotator_system(2.0);
    const int max_threads = omp_get_max_threads();

    auto e1 = ClassicalEnsemble::uniform_angles(20000, 0.0, 909);
    auto e2 = e1;
    auto e3 = e1;

    omp_set_num_threads(1);
    const auto s1 = run_ensemble(sys, e1, 100, ClassicalMode::randomized);
    omp_set_num_threads(std::max(2, max_threads));
    const auto s2 = run_ensemble(sys, e2, 100, ClassicalMode::randomized);
    const auto s3 = ref::run_ensemble(sys, e3, 100, ClassicalMode::randomized);
    omp_set_num_threads(max_threads);

    CHECK(series_equal(s1, s2));
    CHECK(series_equal(s1, s3));
    for (std::size_t i = 0; i < e1.particles.size(); ++i) {
        CHECK(e1.particles[i].p == e2.particles[i].p);
        CHECK(e1.particles[i].p == e3.particles[i].p);
    }
}

TEST_CASE("monte carlo moments agree with the exact recursion within 4 sigma") {
    SystemParams pp;
    pp.v = Potential::cosine_sum({{1, 1.0}, {2, 1.0}});
    pp.lambda = 1.0;
    pp.basis_m = 4;
    const auto sys = build_system(pp);

    auto ensemble = ClassicalEnsemble::uniform_angles(40000, 0.0, 2718);
    const auto mc = run_ensemble(sys, ensemble, 20, ClassicalMode::randomized);
    const auto exact = exact_randomized_moments(sys, MomentRecord{0, 0, 0, 0}, 20);

    for (int k = 1; k <= 20; ++k) {
        for (int ord = 1; ord <= 4; ++ord) {
            const double got = mc.mean[static_cast<std::size_t>(k)][ord];
            const double want = exact.mean[static_cast<std::size_t>(k)][ord];
            const double se = mc.se[static_cast<std::size_t>(k)][ord];
            REQUIRE(se > 0.0);
            CHECK(std::abs(got - want) < 4.5 * se);
        }
    }
}

TEST_CASE("exact recursion: conserved mean and exact variance growth") {
    SystemParams pp;
    pp.v = Potential::cosine_sum({{1, 0.7}, {3, 0.4}});
    pp.lambda = 1.3;
    pp.basis_m = 4;
    const auto sys = build_system(pp);
    const auto series = exact_randomized_moments(sys, MomentRecord{0.25, 0.5, 0.3, 0.9}, 50);

    const double f2 = oracle::angle_average([](double x) {
        const double f = 0.7 * std::sin(x) + 1.2 * std::sin(3.0 * x);
        return f * f;
    });
    const double rate = 1.3 * 1.3 * f2;
    for (int k = 1; k <= 50; ++k) {
        const auto& prev = series.mean[static_cast<std::size_t>(k - 1)];
        const auto& cur = series.mean[static_cast<std::size_t>(k)];
        CHECK(cur.m1 == doctest::Approx(prev.m1).epsilon(1e-14)); // <V'> = 0
        const double dvar = (cur.m2 - cur.m1 * cur.m1) - (prev.m2 - prev.m1 * prev.m1);
        CHECK(std::abs(dvar - rate) < 1e-12);
    }
}

TEST_CASE("exact fourth moment at N = 2 against a 10^7-sample Monte Carlo") {
    const auto sys = rotator_system(1.0);
    auto ensemble = ClassicalEnsemble::uniform_angles(10000000, 0.0, 5151);
    const auto mc = run_ensemble(sys, ensemble, 2, ClassicalMode::randomized);
    const auto exact = exact_randomized_moments(sys, MomentRecord{0, 0, 0, 0}, 2);
    const double got = mc.mean[2].m4;
    const double want = exact.mean[2].m4;
    const double se = mc.se[2].m4;
    REQUIRE(se > 0.0);
    CHECK(std::abs(got - want) < 4.0 * se);
}

TEST_CASE("randomized-map diffusion matches the quasilinear rate") {
    const auto sys = rotator_system(1.0);
    auto ensemble = ClassicalEnsemble::uniform_angles(100000, 0.0, 33);
    const auto series = run_ensemble(sys, ensemble, 200, ClassicalMode::randomized);
    const auto fit = fit_diffusion(series, 1.0, Window{3, 200});
    CHECK(fit.diffusion == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("twist-map diffusion: strongly chaotic vs sub-threshold") {
    // K = 5 sits at a node of the oscillatory correction, so the quasilinear
    // value is accurate there; K = 0.5 is far below the threshold.
    const auto strong = rotator_system(5.0);
    auto e1 = ClassicalEnsemble::uniform_angles(20000, 0.0, 11);
    const auto s1 = run_ensemble(strong, e1, 300, ClassicalMode::twist);
    const auto f1 = fit_diffusion(s1, 1.0, Window{3, 300});
    CHECK(std::abs(f1.diffusion - 12.5) < 0.15 * 12.5);

    const auto weak = rotator_system(0.5);
    auto e2 = ClassicalEnsemble::uniform_angles(20000, 0.0, 12);
    const auto s2 = run_ensemble(weak, e2, 2000, ClassicalMode::twist);
    const auto f2 = fit_diffusion(s2, 1.0, Window{3, 2000});
    CHECK(std::abs(f2.diffusion) < 0.01 * 0.125);
}
