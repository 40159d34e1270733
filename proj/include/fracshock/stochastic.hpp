#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracshock/grid.hpp"

namespace fracshock {

/// Noise coefficient g(mode k >= 1, x, u).
using NoiseCoefficient = std::function<double(std::size_t, double, double)>;

/// Truncated multiplicative noise  Phi(u) dW = sum_{k <= n_modes} g_k(x, u) d beta_k.
struct NoiseSpec {
    std::string name;
    std::size_t n_modes = 0;
    NoiseCoefficient g;
    /// Growth constant: sum_k g_k(x,u)^2 <= K u^2 and sum_k |g_k(x,u) - g_k(x,v)|^2 <= K |u-v|^2.
    double lipschitz_K = 0.0;
    /// Joint constant of sum_k |g_k(x,u) - g_k(y,v)|^2 <= D1 (|x-y|^2 + |u-v|^2)
    /// on |u|, |v| <= working_range. Only meaningful when space_dependent.
    double lipschitz_D1 = 0.0;
    double working_range = 0.0;
    bool space_dependent = false;
    bool enabled = true;

    /// Fast path for g_k(x,u) = amplitude[k-1] * profile(x) * u.
    struct Separable {
        std::vector<double> amplitude;
        std::function<double(double)> profile;
    };
    std::optional<Separable> separable;
};

NoiseSpec no_noise();
/// g_k(u) = sqrt(K) 2^(-k/2) u.
NoiseSpec geometric_noise(double K, std::size_t n_modes = 16);
/// Single mode g_1(u) = sigma u.
NoiseSpec single_mode_noise(double sigma);
/// g_k(x,u) = sqrt(D) 2^(-k/2) u (1 + chi(x)) / 2 with chi a smooth bump of
/// half-width `width` centred at `center`. `working_range` bounds |u| for the
/// joint Lipschitz constant.
NoiseSpec space_dependent_noise(double D, std::size_t n_modes = 16, double center = 0.0, double width = 2.0,
                                double working_range = 4.0);

/// C-infinity bump exp(1 - 1/(1 - s^2)), s = (x - center)/width, and its derivative.
double smooth_bump(double x, double center, double width);
double smooth_bump_derivative(double x, double center, double width);

/// Checks g(k,x,0) = 0 and the growth/Lipschitz bounds on a sampling lattice.
/// Returns a list of violations (empty when the family is admissible).
std::vector<std::string> validate_noise(const NoiseSpec& spec, double x_lo, double x_hi, double u_range,
                                        std::size_t lattice = 41);

/// Increments of n_modes independent standard Brownian motions on a uniform
/// time grid, reproducible from the seed. Row-major [step][mode].
struct WienerPath {
    std::uint64_t seed = 0;
    std::size_t n_steps = 0;
    std::size_t n_modes = 0;
    double dt = 0.0;
    std::vector<double> increments;

    std::span<const double> step(std::size_t n) const
    {
        return std::span<const double>(increments).subspan(n * n_modes, n_modes);
    }
};

WienerPath sample_path(std::uint64_t seed, std::size_t n_steps, std::size_t n_modes, double dt);

/// sum_k g_k(x_i, u_i) dbeta_k per cell.
Field noise_increment(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec,
                      std::span<const double> step_increments);
void noise_increment(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec,
                     std::span<const double> step_increments, std::span<double> out);

/// G^2(x_i, u_i) = sum_k g_k(x_i, u_i)^2 per cell.
Field ito_correction(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec);

} // namespace fracshock
