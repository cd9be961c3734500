#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "kdiff/bessel.hpp"
#include "kdiff/branches.hpp"
#include "kdiff/errors.hpp"
#include "kdiff/propagate.hpp"

using namespace kdiff;

namespace {

KickedSystem rotator_system(double lambda, int basis_m, double tau = 0.5) {
    SystemParams p;
    p.lambda = lambda;
    p.basis_m = basis_m;
    p.tau = tau;
    return build_system(p);
}

StateVector spread_state(int basis_m) {
    // normalized superposition over five basis states with assorted phases
    StateVector c0 = StateVector::delta(basis_m, 0);
    c0.at(0) = {0.5, 0.0};
    c0.at(-2) = {0.0, 0.5};
    c0.at(1) = {-0.5, 0.0};
    c0.at(3) = {0.35355339059327373, 0.35355339059327373};
    c0.at(-4) = {0.0, -0.5};
    const double scale = 1.0 / std::sqrt(c0.norm2());
    for (auto& a : c0.amps) a *= scale;
    return c0;
}

} // namespace

TEST_CASE("initialization: one branch per nonzero amplitude") {
    const auto sys = rotator_system(1.0, 8);
    const auto single = init_branches(StateVector::delta(8, 0), sys);
    CHECK(single.count() == 1);
    CHECK(single.kicks == 0);
    CHECK(single.phase_exponent == 1);
    CHECK(std::abs(std::abs(single.amplitude[0]) - 1.0) < 1e-15);
    CHECK(single.path(0)[0] == 0);

    StateVector two = StateVector::delta(8, 0);
    two.at(0) = {std::sqrt(0.5), 0.0};
    two.at(3) = {0.0, std::sqrt(0.5)};
    const auto pair = init_branches(two, sys);
    CHECK(pair.count() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::norm(pair.amplitude[i]) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("initialization rejects unnormalized states") {
    const auto sys = rotator_system(1.0, 8);
    StateVector bad = StateVector::delta(8, 0);
    bad.at(0) = {0.5, 0.0};
    CHECK_THROWS_AS(init_branches(bad, sys), InvariantError);
}

TEST_CASE("lambda = 0 extends paths without splitting") {
    const auto sys = rotator_system(0.0, 8);
    const auto b = kick_matrix(sys);
    auto state = init_branches(spread_state(8), sys);
    const auto before = state.count();
    kick_branches(state, sys, b);
    CHECK(state.count() == before);
    CHECK(state.kicks == 1);
    for (std::size_t i = 0; i < state.count(); ++i)
        CHECK(state.path(i)[0] == state.path(i)[1]); // pure phase, same index
}

TEST_CASE("first kick from an eigenstate lands on the transition probabilities") {
    const auto sys = rotator_system(1.0, 16);
    const auto b = kick_matrix(sys);
    auto state = init_branches(StateVector::delta(16, 0), sys);
    kick_branches(state, sys, b);
    const auto occ = branch_occupation(state);
    for (int l = -8; l <= 8; ++l) {
        const double j = bessel_j(l, 1.0);
        CHECK(occ.at(l) == doctest::Approx(j * j).epsilon(1e-12));
    }
}

TEST_CASE("probability is conserved through three kicks") {
    const auto sys = rotator_system(1.0, 16);
    const auto b = kick_matrix(sys);
    auto state = init_branches(StateVector::delta(16, 0), sys);
    for (int k = 1; k <= 3; ++k) {
        kick_branches(state, sys, b);
        CHECK(state.total_probability() + state.leak == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(state.total_probability() >= 1.0 - 1e-10);
}

TEST_CASE("occupations match the master equation for a delta start") {
    const auto sys = rotator_system(1.0, 16);
    const auto b = kick_matrix(sys);
    const auto w = transition_matrix(b);
    auto state = init_branches(StateVector::delta(16, 0), sys);
    auto master = MomentumDistribution::delta(16, 0);
    for (int k = 1; k <= 2; ++k) {
        kick_branches(state, sys, b);
        master = step_master(master, w);
    }
    const auto occ = branch_occupation(state);
    occ.check(1e-10); // occupation + leak is still a distribution
    for (int n = -16; n <= 16; ++n) CHECK(std::abs(occ.at(n) - master.at(n)) < 1e-12);
}

TEST_CASE("occupations match the master equation for an arbitrary five-state start") {
    const auto sys = rotator_system(1.0, 16);
    const auto b = kick_matrix(sys);
    const auto w = transition_matrix(b);
    const auto c0 = spread_state(16);
    auto state = init_branches(c0, sys);
    auto master = c0.to_distribution();
    for (int k = 1; k <= 3; ++k) {
        kick_branches(state, sys, b);
        master = step_master(master, w);
        const auto occ = branch_occupation(state);
        for (int n = -16; n <= 16; ++n) CHECK(std::abs(occ.at(n) - master.at(n)) < 1e-12);
    }
    CHECK(state.phase_exponent == 4); // (-i)^{N+1}
}

TEST_CASE("occupations are invariant under the measurement offset tau") {
    const auto run_with_tau = [](double tau) {
        const auto sys = rotator_system(1.0, 12, tau);
        const auto b = kick_matrix(sys);
        auto state = init_branches(spread_state(12), sys);
        for (int k = 0; k < 2; ++k) kick_branches(state, sys, b);
        return branch_occupation(state);
    };
    const auto a = run_with_tau(0.25);
    const auto c = run_with_tau(0.75);
    for (int n = -12; n <= 12; ++n) CHECK(std::abs(a.at(n) - c.at(n)) < 1e-13);
}

TEST_CASE("no two branches share a path") {
    const auto sys = rotator_system(1.0, 12);
    const auto b = kick_matrix(sys);
    auto state = init_branches(spread_state(12), sys);
    kick_branches(state, sys, b);
    kick_branches(state, sys, b);
    std::set<std::vector<std::int32_t>> seen;
    for (std::size_t i = 0; i < state.count(); ++i) {
        const auto p = state.path(i);
        const auto [it, inserted] = seen.insert(std::vector<std::int32_t>(p.begin(), p.end()));
        CHECK(inserted);
    }
}

TEST_CASE("branch budget errors name the offending kick") {
    const auto sys = rotator_system(1.0, 16);
    const auto b = kick_matrix(sys);
    auto state = init_branches(StateVector::delta(16, 0), sys);
    kick_branches(state, sys, b, 1000000);
    try {
        kick_branches(state, sys, b, 100); // parents * fanout now far above 100
        FAIL("expected BudgetError");
    } catch (const BudgetError& e) {
        CHECK(e.kick() == 2);
    }
}
