#include "fracshock/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fracshock {

double smooth_bump(double x, double center, double width)
{
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double smooth_bump_derivative(double x, double center, double width)
{
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0)
        return 0.0;
    const double q = 1.0 - s * s;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * s / (q * q)) / width;
}

NoiseSpec no_noise()
{
    NoiseSpec s;
    s.name = "none";
    s.n_modes = 1;
    s.g = [](std::size_t, double, double) { return 0.0; };
    s.enabled = false;
    return s;
}

namespace {

std::vector<double> geometric_amplitudes(double strength, std::size_t n_modes)
{
    std::vector<double> a(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k)
        a[k - 1] = std::sqrt(strength) * std::pow(2.0, -0.5 * static_cast<double>(k));
    return a;
}

NoiseSpec separable_noise(std::string name, std::vector<double> amplitude, std::function<double(double)> profile)
{
    if (amplitude.empty())
        throw std::invalid_argument("noise needs at least one mode");
    NoiseSpec s;
    s.name = std::move(name);
    s.n_modes = amplitude.size();
    s.g = [amplitude, profile](std::size_t k, double x, double u) {
        if (k == 0 || k > amplitude.size())
            throw std::out_of_range("noise mode index out of range");
        return amplitude[k - 1] * profile(x) * u;
    };
    s.separable = NoiseSpec::Separable{std::move(amplitude), std::move(profile)};
    return s;
}

} // namespace

NoiseSpec geometric_noise(double K, std::size_t n_modes)
{
    if (!(K >= 0.0))
        throw std::invalid_argument("noise constant K must be nonnegative");
    if (n_modes == 0)
        throw std::invalid_argument("n_modes must be positive");
    auto s = separable_noise("geometric", geometric_amplitudes(K, n_modes), [](double) { return 1.0; });
    s.lipschitz_K = K;
    s.enabled = K > 0.0;
    return s;
}

NoiseSpec single_mode_noise(double sigma)
{
    auto s = separable_noise("single", {sigma}, [](double) { return 1.0; });
    s.lipschitz_K = sigma * sigma;
    s.enabled = sigma != 0.0;
    return s;
}

NoiseSpec space_dependent_noise(double D, std::size_t n_modes, double center, double width, double working_range)
{
    if (!(D >= 0.0))
        throw std::invalid_argument("noise constant D1 must be nonnegative");
    if (n_modes == 0)
        throw std::invalid_argument("n_modes must be positive");
    if (!(width > 0.0))
        throw std::invalid_argument("noise profile width must be positive");
    auto profile = [center, width](double x) { return 0.5 * (1.0 + smooth_bump(x, center, width)); };
    auto s = separable_noise("space-dependent", geometric_amplitudes(D, n_modes), profile);
    s.space_dependent = true;
    s.lipschitz_K = D;
    // |u p(x) - v p(y)|^2 <= 2 |u-v|^2 p^2 + 2 v^2 |p'|^2 |x-y|^2 with p <= 1,
    // sup |p'| = sup |chi'| / 2 and sum_k 2^-k < 1.
    const double chi_slope = 2.0 * std::sqrt(2.0) * std::exp(-0.5) / width; // bound on sup|chi'|
    const double p_slope = 0.5 * chi_slope;
    s.lipschitz_D1 = 2.0 * D * std::max(1.0, working_range * working_range * p_slope * p_slope);
    s.working_range = working_range;
    s.enabled = D > 0.0;
    return s;
}

std::vector<std::string> validate_noise(const NoiseSpec& spec, double x_lo, double x_hi, double u_range,
                                        std::size_t lattice)
{
    std::vector<std::string> out;
    auto report = [&out](const std::string& what, double x, double u) {
        std::ostringstream os;
        os << what << " at x=" << x << ", u=" << u;
        out.push_back(os.str());
    };
    const double tol = 1e-12;
    auto xs = [&](std::size_t a) { return x_lo + (x_hi - x_lo) * static_cast<double>(a) / (lattice - 1); };
    auto us = [&](std::size_t b) { return -u_range + 2.0 * u_range * static_cast<double>(b) / (lattice - 1); };
    for (std::size_t a = 0; a < lattice; ++a) {
        const double x = xs(a);
        for (std::size_t k = 1; k <= spec.n_modes; ++k)
            if (std::abs(spec.g(k, x, 0.0)) > tol)
                report("g_k(x,0) != 0 for k=" + std::to_string(k), x, 0.0);
        for (std::size_t b = 0; b < lattice; ++b) {
            const double u = us(b);
            double g2 = 0.0;
            for (std::size_t k = 1; k <= spec.n_modes; ++k) {
                const double g = spec.g(k, x, u);
                g2 += g * g;
            }
            if (g2 > spec.lipschitz_K * u * u * (1.0 + 1e-12) + tol)
                report("sum_k g_k^2 exceeds K u^2", x, u);
        }
    }
    // Pairwise Lipschitz checks on a coarser sub-lattice.
    const std::size_t step = std::max<std::size_t>(1, lattice / 10);
    for (std::size_t a = 0; a < lattice; a += step)
        for (std::size_t a2 = 0; a2 < lattice; a2 += step)
            for (std::size_t b = 0; b < lattice; b += step)
                for (std::size_t b2 = 0; b2 < lattice; b2 += step) {
                    const double x = xs(a), y = xs(a2), u = us(b), v = us(b2);
                    double same_x = 0.0, joint = 0.0;
                    for (std::size_t k = 1; k <= spec.n_modes; ++k) {
                        const double d1 = spec.g(k, x, u) - spec.g(k, x, v);
                        const double d2 = spec.g(k, x, u) - spec.g(k, y, v);
                        same_x += d1 * d1;
                        joint += d2 * d2;
                    }
                    if (same_x > spec.lipschitz_K * (u - v) * (u - v) * (1.0 + 1e-12) + tol)
                        report("u-Lipschitz bound violated", x, u);
                    if (spec.space_dependent && std::abs(u) <= spec.working_range
                        && std::abs(v) <= spec.working_range
                        && joint > spec.lipschitz_D1 * ((x - y) * (x - y) + (u - v) * (u - v)) * (1.0 + 1e-12) + tol)
                        report("joint (x,u)-Lipschitz bound violated", x, u);
                }
    return out;
}

WienerPath sample_path(std::uint64_t seed, std::size_t n_steps, std::size_t n_modes, double dt)
{
    if (n_modes == 0)
        throw std::invalid_argument("sample_path: n_modes must be positive");
    if (!(dt > 0.0))
        throw std::invalid_argument("sample_path: dt must be positive");
    WienerPath p;
    p.seed = seed;
    p.n_steps = n_steps;
    p.n_modes = n_modes;
    p.dt = dt;
    p.increments.resize(n_steps * n_modes);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    for (double& v : p.increments)
        v = normal(rng);
    return p;
}

void noise_increment(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec,
                     std::span<const double> step_increments, std::span<double> out)
{
    if (step_increments.size() != spec.n_modes)
        throw std::invalid_argument("noise_increment: path has " + std::to_string(step_increments.size())
                                    + " modes but the noise spec has " + std::to_string(spec.n_modes));
    if (x_centers.size() != u.size() || out.size() != u.size())
        throw std::invalid_argument("noise_increment: field size mismatch");
    if (!spec.enabled) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    if (spec.separable) {
        double xi = 0.0;
        for (std::size_t k = 0; k < spec.n_modes; ++k)
            xi += spec.separable->amplitude[k] * step_increments[k];
        for (std::size_t i = 0; i < u.size(); ++i)
            out[i] = xi * spec.separable->profile(x_centers[i]) * u[i];
        return;
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 1; k <= spec.n_modes; ++k)
            s += spec.g(k, x_centers[i], u[i]) * step_increments[k - 1];
        out[i] = s;
    }
}

Field noise_increment(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec,
                      std::span<const double> step_increments)
{
    Field out(u.size());
    noise_increment(u, x_centers, spec, step_increments, out);
    return out;
}

Field ito_correction(std::span<const double> u, std::span<const double> x_centers, const NoiseSpec& spec)
{
    if (x_centers.size() != u.size())
        throw std::invalid_argument("ito_correction: field size mismatch");
    Field out(u.size(), 0.0);
    if (!spec.enabled)
        return out;
    if (spec.separable) {
        double a2 = 0.0;
        for (double a : spec.separable->amplitude)
            a2 += a * a;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double p = spec.separable->profile(x_centers[i]);
            out[i] = a2 * p * p * u[i] * u[i];
        }
        return out;
    }
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t k = 1; k <= spec.n_modes; ++k) {
            const double g = spec.g(k, x_centers[i], u[i]);
            out[i] += g * g;
        }
    return out;
}

} // namespace fracshock
