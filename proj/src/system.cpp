#include "kdiff/system.hpp"

#include <cmath>
#include <string>

#include "kdiff/errors.hpp"

namespace kdiff {

FreeHamiltonian FreeHamiltonian::rotator(double inertia) {
    FreeHamiltonian h;
    h.kind = Kind::rotator;
    h.inertia = inertia;
    return h;
}

FreeHamiltonian FreeHamiltonian::polynomial(std::vector<double> coefficients) {
    FreeHamiltonian h;
    h.kind = Kind::polynomial;
    h.coefficients = std::move(coefficients);
    return h;
}

FreeHamiltonian FreeHamiltonian::tabulated(std::vector<double> values) {
    FreeHamiltonian h;
    h.kind = Kind::tabulated;
    h.table = std::move(values);
    return h;
}

double FreeHamiltonian::value(double p) const {
    switch (kind) {
    case Kind::rotator:
        return p * p / (2.0 * inertia);
    case Kind::polynomial: {
        double s = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) s = s * p + *it;
        return s;
    }
    case Kind::tabulated:
        throw InvariantError("tabulated H0 supports only lattice lookups, not H0(p)");
    }
    return 0.0;
}

double FreeHamiltonian::derivative(double p) const {
    switch (kind) {
    case Kind::rotator:
        return p / inertia;
    case Kind::polynomial: {
        double s = 0.0;
        for (std::size_t j = coefficients.size(); j-- > 1;)
            s = s * p + static_cast<double>(j) * coefficients[j];
        return s;
    }
    case Kind::tabulated:
        throw InvariantError("tabulated H0 has no derivative; the twist map needs rotator or "
                             "polynomial kinds");
    }
    return 0.0;
}

std::optional<double> FreeHamiltonian::mass() const {
    if (kind == Kind::rotator) return inertia;
    if (kind == Kind::polynomial && coefficients.size() == 3 && coefficients[0] == 0.0 &&
        coefficients[1] == 0.0 && coefficients[2] > 0.0)
        return 1.0 / (2.0 * coefficients[2]);
    return std::nullopt;
}

double KickedSystem::h0_at(int n) const {
    if (h0.kind == FreeHamiltonian::Kind::tabulated)
        return h0.table[static_cast<std::size_t>(n + basis_m)];
    return h0.value(momentum(n));
}

namespace {

int default_grid(int basis_m) {
    int g = 1;
    while (g < KickedSystem::min_grid(basis_m)) g *= 2;
    return g;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

KickedSystem build_system(const SystemParams& params) {
    require(std::isfinite(params.lambda) && params.lambda >= 0.0,
            "lambda must satisfy lambda >= 0, got " + std::to_string(params.lambda));
    require(std::isfinite(params.period_t) && params.period_t > 0.0,
            "period_t must satisfy period_t > 0, got " + std::to_string(params.period_t));
    require(std::isfinite(params.tau) && params.tau > 0.0 && params.tau < params.period_t,
            "tau must satisfy 0 < tau < period_t = " + std::to_string(params.period_t) +
                ", got " + std::to_string(params.tau));
    require(std::isfinite(params.hbar) && params.hbar > 0.0,
            "hbar must satisfy hbar > 0, got " + std::to_string(params.hbar));
    require(params.basis_m >= 1,
            "basis_m must satisfy basis_m >= 1, got " + std::to_string(params.basis_m));
    if (params.h0.kind == FreeHamiltonian::Kind::rotator)
        require(std::isfinite(params.h0.inertia) && params.h0.inertia > 0.0,
                "inertia must satisfy inertia > 0, got " + std::to_string(params.h0.inertia));
    if (params.h0.kind == FreeHamiltonian::Kind::tabulated)
        require(params.h0.table.size() == static_cast<std::size_t>(2 * params.basis_m + 1),
                "tabulated H0 needs exactly 2*basis_m+1 = " +
                    std::to_string(2 * params.basis_m + 1) + " values, got " +
                    std::to_string(params.h0.table.size()));

    int grid_g = params.grid_g;
    if (grid_g == 0) grid_g = default_grid(params.basis_m);
    const int floor = KickedSystem::min_grid(params.basis_m);
    require(grid_g >= floor, "grid_g = " + std::to_string(grid_g) +
                                 " is below the anti-aliasing floor; use grid_g >= " +
                                 std::to_string(floor));

    KickedSystem sys{params.h0,      params.v,    params.lambda, params.period_t,
                     params.tau,     params.hbar, params.basis_m, grid_g};

    // Every lattice point must evaluate to something finite.
    if (sys.h0.kind != FreeHamiltonian::Kind::tabulated) {
        for (int n = -sys.basis_m; n <= sys.basis_m; ++n)
            require(std::isfinite(sys.h0_at(n)),
                    "H0(p_n) is not finite at n = " + std::to_string(n));
    } else {
        for (double y : sys.h0.table)
            require(std::isfinite(y), "tabulated H0 has a non-finite value");
    }
    return sys;
}

} // namespace kdiff
