#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdiff/errors.hpp"
#include "kdiff/state.hpp"
#include "kdiff/system.hpp"
#include "oracles.hpp"

using namespace kdiff;

namespace {

SystemParams base_params() {
    SystemParams p;
    p.h0 = FreeHamiltonian::rotator(1.0);
    p.v = Potential::cosine();
    p.lambda = 1.0;
    p.period_t = 1.0;
    p.tau = 0.5;
    p.hbar = 1.0;
    p.basis_m = 64;
    p.grid_g = 512;
    return p;
}

} // namespace

TEST_CASE("build_system accepts a valid rotator configuration") {
    const KickedSystem sys = build_system(base_params());
    CHECK(sys.dim() == 129);
    CHECK(sys.momentum(3) == 3.0);
    CHECK(sys.h0_at(4) == doctest::Approx(8.0)); // p^2 / 2I
}

TEST_CASE("build_system rejects out-of-range fields by name") {
    auto p = base_params();
    p.tau = 1.5;
    CHECK_THROWS_WITH_AS(build_system(p), doctest::Contains("tau"), ConfigError);

    p = base_params();
    p.grid_g = 100;
    CHECK_THROWS_WITH_AS(build_system(p), doctest::Contains("257"), ConfigError);

    p = base_params();
    p.lambda = -1.0;
    CHECK_THROWS_WITH_AS(build_system(p), doctest::Contains("lambda"), ConfigError);

    p = base_params();
    p.hbar = 0.0;
    CHECK_THROWS_WITH_AS(build_system(p), doctest::Contains("hbar"), ConfigError);

    p = base_params();
    p.basis_m = 0;
    CHECK_THROWS_WITH_AS(build_system(p), doctest::Contains("basis_m"), ConfigError);
}

TEST_CASE("grid_g = 0 resolves to the smallest power of two above the floor") {
    auto p = base_params();
    p.grid_g = 0;
    CHECK(build_system(p).grid_g == 512); // floor 257
    p.basis_m = 256;
    CHECK(build_system(p).grid_g == 2048); // floor 1025
}

TEST_CASE("tabulated H0 must cover the lattice exactly") {
    auto p = base_params();
    p.basis_m = 4;
    p.h0 = FreeHamiltonian::tabulated(std::vector<double>(9, 1.0));
    const KickedSystem sys = build_system(p);
    CHECK(sys.h0_at(-4) == 1.0);

    p.h0 = FreeHamiltonian::tabulated(std::vector<double>(7, 1.0));
    CHECK_THROWS_AS(build_system(p), ConfigError);
}

TEST_CASE("polynomial H0 evaluates value and derivative") {
    const auto h = FreeHamiltonian::polynomial({0.0, 0.0, 0.5}); // p^2/2
    CHECK(h.value(3.0) == doctest::Approx(4.5));
    CHECK(h.derivative(3.0) == doctest::Approx(3.0));
    CHECK(h.mass().value() == doctest::Approx(1.0));
    const auto r = FreeHamiltonian::rotator(2.0);
    CHECK(r.value(2.0) == doctest::Approx(1.0));
    CHECK(r.mass().value() == doctest::Approx(2.0));
}

TEST_CASE("mean force squared: closed forms") {
    CHECK(mean_force_squared(Potential::cosine(), 512) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(mean_force_squared(Potential::zero(), 512) == 0.0);
    const auto v12 = Potential::cosine_sum({{1, 1.0}, {2, 1.0}});
    CHECK(mean_force_squared(v12, 512) == doctest::Approx(2.5).epsilon(1e-12));
    // independent Simpson oracle on the analytic force
    const double want = oracle::angle_average([](double x) {
        const double f = std::sin(x) + 2.0 * std::sin(2.0 * x);
        return f * f;
    });
    CHECK(mean_force_squared(v12, 512) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("mean force derivative squared: closed forms") {
    CHECK(mean_force_deriv_squared(Potential::cosine(), 512) ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK(mean_force_deriv_squared(Potential::zero(), 512) == 0.0);
    CHECK(mean_force_deriv_squared(Potential::cosine_sum({{2, 1.0}}), 512) ==
          doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("force averages ignore constant shifts of V") {
    // a sampled potential with and without a constant offset
    const int s = 64;
    std::vector<double> plain(s), shifted(s);
    for (int j = 0; j < s; ++j) {
        const double x = -oracle::kPi + 2.0 * oracle::kPi * j / s;
        plain[j] = std::cos(x) + 0.5 * std::cos(2.0 * x);
        shifted[j] = plain[j] + 5.0;
    }
    const auto a = Potential::sampled(plain);
    const auto b = Potential::sampled(shifted);
    CHECK(mean_force_squared(a, 513) ==
          doctest::Approx(mean_force_squared(b, 513)).epsilon(1e-13));
}

TEST_CASE("sampled representation matches the closed form") {
    const auto closed = Potential::cosine_sum({{1, 1.0}, {2, 0.5}});
    const int s = 16; // well above 2*kmax+1
    std::vector<double> values(s);
    for (int j = 0; j < s; ++j) {
        const double x = -oracle::kPi + 2.0 * oracle::kPi * j / s;
        values[static_cast<std::size_t>(j)] = closed.value(x);
    }
    const auto samp = Potential::sampled(values);
    for (double x : {-2.0, -0.3, 0.0, 1.234}) {
        CHECK(samp.value(x) == doctest::Approx(closed.value(x)).epsilon(1e-10));
        CHECK(samp.force(x) == doctest::Approx(closed.force(x)).epsilon(1e-10));
        CHECK(samp.force_deriv(x) == doctest::Approx(closed.force_deriv(x)).epsilon(1e-10));
    }
    const int g = 4 * closed.max_harmonic() + 1;
    CHECK(mean_force_squared(samp, g) ==
          doctest::Approx(mean_force_squared(closed, g)).epsilon(1e-10));
    CHECK(mean_force_deriv_squared(samp, g) ==
          doctest::Approx(mean_force_deriv_squared(closed, g)).epsilon(1e-10));
}

TEST_CASE("potential validation") {
    CHECK_THROWS_AS(Potential::cosine_sum({}), InvariantError);
    CHECK_THROWS_AS(Potential::cosine_sum({{0, 1.0}}), InvariantError);
    CHECK_THROWS_AS(Potential::sampled({1.0, 2.0}), InvariantError);
}

TEST_CASE("momentum distribution invariants") {
    auto p = MomentumDistribution::delta(4, 0);
    CHECK(p.sum() == 1.0);
    p.check();
    p.at(2) = -1e-9;
    CHECK_THROWS_AS(p.check(), InvariantError);
    p.at(2) = 0.0;
    p.leak = 0.5;
    CHECK_THROWS_AS(p.check(), InvariantError);
    CHECK_THROWS_AS(MomentumDistribution::delta(4, 9), InvariantError);
}

TEST_CASE("state vector basics") {
    const auto s = StateVector::delta(4, -2);
    CHECK(s.norm2() == 1.0);
    const auto p = s.to_distribution();
    CHECK(p.at(-2) == 1.0);
    CHECK(p.sum() == 1.0);
}
