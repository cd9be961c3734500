#pragma once

#include <string>
#include <vector>

namespace kdiff {

struct Harmonic {
    int k;         // harmonic index >= 1
    double weight; // coefficient of cos(k x)
};

/// 2*pi-periodic kick potential V(x) on [-pi, pi).
///
/// Closed forms are cosine sums; sampled potentials are given on the uniform
/// grid x_j = -pi + 2*pi*j/S and reduced to their trigonometric series once at
/// construction (spectral differentiation, not finite differences), so V, the
/// force f = -V' and f' are all available analytically afterwards.
class Potential {
public:
    static Potential cosine(); // V = cos x
    static Potential cosine_sum(std::vector<Harmonic> harmonics);
    static Potential sampled(std::vector<double> values);
    static Potential zero();

    double value(double x) const;
    double force(double x) const;       // f = -V'
    double force_deriv(double x) const; // f' = -V''

    int max_harmonic() const { return static_cast<int>(a_.size()) - 1; }
    const std::string& id() const { return id_; }

private:
    Potential() = default;
    // V(x) = a_0 + sum_{k>=1} a_k cos(k x) + b_k sin(k x)
    std::vector<double> a_;
    std::vector<double> b_;
    std::string id_;
};

/// Uniform angle average of f^2 = (V')^2 over [-pi, pi), by trapezoidal
/// quadrature on the periodic grid of grid_g points (spectrally accurate;
/// exact for band-limited V once grid_g > 2 * max_harmonic).
double mean_force_squared(const Potential& v, int grid_g);

/// Uniform angle average of (f')^2 = (V'')^2.
double mean_force_deriv_squared(const Potential& v, int grid_g);

/// Uniform angle average of f^k, k = 1..4; the moment recursions consume these.
double mean_force_power(const Potential& v, int grid_g, int k);

} // namespace kdiff
