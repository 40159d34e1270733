#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "fracshock/grid.hpp"

namespace fracshock {

using ScalarFn = std::function<double(double)>;

/// Scalar flux f with f(0) = 0, Lipschitz with `lipschitz_bound` on [-range, range].
struct FluxSpec {
    std::string name;
    ScalarFn f;
    ScalarFn f_prime;
    double lipschitz_bound = 0.0;
    /// Solutions must stay in [-range, range]; the flux is only declared
    /// Lipschitz there.
    double range = std::numeric_limits<double>::infinity();
    /// Optional closed forms of int_0^a max(f',0) and int_0^a min(f',0).
    ScalarFn positive_part;
    ScalarFn negative_part;
    bool is_zero = false;
};

/// Nondecreasing Lipschitz diffusion nonlinearity with A(0) = 0.
struct DiffusionSpec {
    std::string name;
    ScalarFn A;
    ScalarFn A_prime;
    double lipschitz_bound = 0.0;
    bool is_zero = false;
};

/// Convex entropy eta from the family approximating |x|: eta(0) = 0,
/// eta' = sign outside [-delta, delta], eta'' supported in [-delta, delta].
struct EntropyPair {
    double delta = 0.0;

    double eta(double x) const;
    double eta_prime(double x) const;
    double eta_double_prime(double x) const;
};

struct InitialData {
    Field u0;
    double l1_norm = 0.0;
    double l2_norm = 0.0;
    double tv = 0.0;
};

InitialData make_initial_data(Field u0, const Grid& grid);

// Built-in fluxes.
FluxSpec zero_flux();
FluxSpec linear_flux(double c);
/// u^2/2 on [-M, M], continued linearly outside so f' = clamp(u, -M, M).
FluxSpec burgers_flux(double clip);

// Built-in diffusions.
DiffusionSpec zero_diffusion();
DiffusionSpec identity_diffusion(double scale = 1.0);
/// A(u) = slope * max(u - threshold, 0); degenerate below the threshold.
DiffusionSpec ramp_diffusion(double threshold, double slope);
/// A(u) = level * tanh(u / level).
DiffusionSpec saturating_diffusion(double level);
/// B(u) = A(u) + amplitude * tanh(u), so that sup |A' - B'| = |amplitude|.
DiffusionSpec perturbed_diffusion(const DiffusionSpec& base, double amplitude);

/// F(a,b) = sign(a-b) (f(a) - f(b)).
double kruzkov_flux(double a, double b, const FluxSpec& flux);

/// F^eta(a,k) = int_k^a eta'(s-k) f'(s) ds.
double entropy_flux(double a, double k, const FluxSpec& flux, const EntropyPair& ep);

/// A^eta_k(a) = int_k^a eta'(s-k) A'(s) ds.
double a_eta_k(double a, double k, const DiffusionSpec& diff, const EntropyPair& ep);

/// Quartic C^2 blend: eta(x) = -x^4/(8 delta^3) + 3 x^2/(4 delta) on
/// [-delta, delta], |x| - 3 delta/8 outside.
EntropyPair make_eta_delta(double delta);

/// Number of midpoint nodes used on the smoothing band of the entropy integrals.
inline constexpr int entropy_quadrature_nodes = 64;

} // namespace fracshock
