#include "fracshock/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fracshock {

double EntropyPair::eta(double x) const
{
    const double ax = std::abs(x);
    if (ax >= delta)
        return ax - 0.375 * delta;
    const double x2 = x * x;
    return -x2 * x2 / (8.0 * delta * delta * delta) + 0.75 * x2 / delta;
}

double EntropyPair::eta_prime(double x) const
{
    if (x >= delta)
        return 1.0;
    if (x <= -delta)
        return -1.0;
    return -x * x * x / (2.0 * delta * delta * delta) + 1.5 * x / delta;
}

double EntropyPair::eta_double_prime(double x) const
{
    if (std::abs(x) >= delta)
        return 0.0;
    return 1.5 / delta - 1.5 * x * x / (delta * delta * delta);
}

EntropyPair make_eta_delta(double delta)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("entropy regularisation width delta must be positive");
    return EntropyPair{delta};
}

InitialData make_initial_data(Field u0, const Grid& grid)
{
    require_same_size(u0, grid, "initial data");
    for (double v : u0)
        if (!std::isfinite(v))
            throw std::invalid_argument("initial data must be finite");
    InitialData d;
    d.l1_norm = l1_norm(u0, grid);
    d.l2_norm = std::sqrt(l2_norm_sq(u0, grid));
    d.tv = total_variation(u0, grid);
    d.u0 = std::move(u0);
    return d;
}

FluxSpec zero_flux()
{
    FluxSpec s;
    s.name = "zero";
    s.f = [](double) { return 0.0; };
    s.f_prime = [](double) { return 0.0; };
    s.positive_part = [](double) { return 0.0; };
    s.negative_part = [](double) { return 0.0; };
    s.is_zero = true;
    return s;
}

FluxSpec linear_flux(double c)
{
    FluxSpec s;
    s.name = "linear";
    s.f = [c](double u) { return c * u; };
    s.f_prime = [c](double) { return c; };
    s.lipschitz_bound = std::abs(c);
    s.positive_part = [c](double a) { return std::max(c, 0.0) * a; };
    s.negative_part = [c](double a) { return std::min(c, 0.0) * a; };
    s.is_zero = c == 0.0;
    return s;
}

FluxSpec burgers_flux(double clip)
{
    if (!(clip > 0.0))
        throw std::invalid_argument("Burgers clipping range must be positive");
    FluxSpec s;
    s.name = "burgers";
    s.f = [clip](double u) {
        const double a = std::abs(u);
        return a <= clip ? 0.5 * u * u : clip * a - 0.5 * clip * clip;
    };
    s.f_prime = [clip](double u) { return std::clamp(u, -clip, clip); };
    s.lipschitz_bound = clip;
    s.range = clip;
    // f is even and increasing on [0, inf), so the split parts are f on one side.
    auto f = s.f;
    s.positive_part = [f](double a) { return a > 0.0 ? f(a) : 0.0; };
    s.negative_part = [f](double a) { return a < 0.0 ? f(a) : 0.0; };
    return s;
}

DiffusionSpec zero_diffusion()
{
    DiffusionSpec d;
    d.name = "zero";
    d.A = [](double) { return 0.0; };
    d.A_prime = [](double) { return 0.0; };
    d.is_zero = true;
    return d;
}

DiffusionSpec identity_diffusion(double scale)
{
    if (!(scale > 0.0))
        throw std::invalid_argument("identity diffusion scale must be positive");
    DiffusionSpec d;
    d.name = "identity";
    d.A = [scale](double u) { return scale * u; };
    d.A_prime = [scale](double) { return scale; };
    d.lipschitz_bound = scale;
    return d;
}

DiffusionSpec ramp_diffusion(double threshold, double slope)
{
    if (threshold < 0.0)
        throw std::invalid_argument("ramp threshold must be nonnegative so that A(0) = 0");
    if (!(slope > 0.0))
        throw std::invalid_argument("ramp slope must be positive");
    DiffusionSpec d;
    d.name = "ramp";
    d.A = [threshold, slope](double u) { return slope * std::max(u - threshold, 0.0); };
    d.A_prime = [threshold, slope](double u) { return u > threshold ? slope : 0.0; };
    d.lipschitz_bound = slope;
    return d;
}

DiffusionSpec saturating_diffusion(double level)
{
    if (!(level > 0.0))
        throw std::invalid_argument("saturation level must be positive");
    DiffusionSpec d;
    d.name = "saturating";
    d.A = [level](double u) { return level * std::tanh(u / level); };
    d.A_prime = [level](double u) {
        const double c = std::cosh(u / level);
        return 1.0 / (c * c);
    };
    d.lipschitz_bound = 1.0;
    return d;
}

DiffusionSpec perturbed_diffusion(const DiffusionSpec& base, double amplitude)
{
    if (amplitude < 0.0)
        throw std::invalid_argument("perturbation amplitude must be nonnegative to keep B nondecreasing");
    if (amplitude == 0.0)
        return base;
    DiffusionSpec d;
    d.name = base.name + "+tanh";
    auto A = base.A;
    auto Ap = base.A_prime;
    d.A = [A, amplitude](double u) { return A(u) + amplitude * std::tanh(u); };
    d.A_prime = [Ap, amplitude](double u) {
        const double c = std::cosh(u);
        return Ap(u) + amplitude / (c * c);
    };
    d.lipschitz_bound = base.lipschitz_bound + amplitude;
    return d;
}

double kruzkov_flux(double a, double b, const FluxSpec& flux)
{
    if (a == b)
        return 0.0;
    const double diff = flux.f(a) - flux.f(b);
    return a > b ? diff : -diff;
}

namespace {

// int_lo^hi eta'(s-k) g'(s) ds by composite midpoint, lo <= hi.
double band_integral(double lo, double hi, double k, const ScalarFn& g_prime, const EntropyPair& ep)
{
    if (hi <= lo)
        return 0.0;
    const double h = (hi - lo) / entropy_quadrature_nodes;
    double s = 0.0;
    for (int q = 0; q < entropy_quadrature_nodes; ++q) {
        const double x = lo + (q + 0.5) * h;
        s += ep.eta_prime(x - k) * g_prime(x);
    }
    return s * h;
}

// int_k^a eta'(s-k) g'(s) ds. Outside [k-delta, k+delta] eta' = +-1 and the
// integral is a difference of g; only the band needs quadrature.
double eta_weighted_integral(double a, double k, const ScalarFn& g, const ScalarFn& g_prime,
                             const EntropyPair& ep)
{
    const double d = ep.delta;
    if (a >= k) {
        const double band_end = std::min(a, k + d);
        double s = band_integral(k, band_end, k, g_prime, ep);
        if (a > k + d)
            s += g(a) - g(k + d);
        return s;
    }
    const double band_start = std::max(a, k - d);
    double s = -band_integral(band_start, k, k, g_prime, ep);
    if (a < k - d)
        s += g(k - d) - g(a);
    return s;
}

} // namespace

double entropy_flux(double a, double k, const FluxSpec& flux, const EntropyPair& ep)
{
    if (flux.is_zero || a == k)
        return 0.0;
    return eta_weighted_integral(a, k, flux.f, flux.f_prime, ep);
}

double a_eta_k(double a, double k, const DiffusionSpec& diff, const EntropyPair& ep)
{
    if (diff.is_zero || a == k)
        return 0.0;
    return eta_weighted_integral(a, k, diff.A, diff.A_prime, ep);
}

} // namespace fracshock
