#pragma once

// Independent continuum references for the fractional Laplacian, computed by
// adaptive quadrature. Test-only; shares no code with the library quadrature.

#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

namespace fracshock::oracle {

/// c * int_0^inf (2u(x) - u(x+z) - u(x-z)) z^(-1-2 lambda) dz for a function
/// decaying to zero, with u'' and u'''' used for the Taylor expansion at z -> 0.
/// The far field beyond `z_far` contributes 2u(x) z^(-1-2 lambda) only.
inline double fractional_laplacian(const std::function<double(double)>& u,
                                   const std::function<double(double)>& u2,
                                   const std::function<double(double)>& u4, double x, double lambda,
                                   double c_lambda = 1.0, double z_far = 40.0)
{
    using boost::math::quadrature::gauss_kronrod;
    const double ux = u(x);
    const double d2 = u2(x);
    const double d4 = u4(x);
    auto integrand = [&](double z) {
        if (z < 1e-3) {
            // D(z) = -u'' z^2 - u'''' z^4 / 12 - ...
            const double g = -d2 - d4 * z * z / 12.0;
            return g * std::pow(z, 1.0 - 2.0 * lambda);
        }
        return (2.0 * ux - u(x + z) - u(x - z)) * std::pow(z, -1.0 - 2.0 * lambda);
    };
    double total = 0.0;
    const double breaks[] = {0.0, 1e-3, 0.05, 0.25, 1.0, 2.0, 4.0, 8.0, 16.0, z_far};
    for (std::size_t b = 0; b + 1 < std::size(breaks); ++b)
        total += gauss_kronrod<double, 61>::integrate(integrand, breaks[b], breaks[b + 1], 15, 1e-13);
    total += 2.0 * ux * std::pow(z_far, -2.0 * lambda) / (2.0 * lambda);
    return c_lambda * total;
}

/// Symbol s(lambda) with L[cos(w x)] = s(lambda) |w|^(2 lambda) cos(w x) for c = 1,
/// i.e. 2 int_0^inf (1 - cos z) z^(-1-2 lambda) dz, evaluated by quadrature:
/// Gauss-Kronrod on [0, a] and an Ooura Fourier integral for the oscillatory tail.
inline double symbol_by_quadrature(double lambda)
{
    using boost::math::quadrature::gauss_kronrod;
    const double s = 1.0 + 2.0 * lambda;
    const double a = 4.0 * M_PI;
    auto near = [&](double z) {
        if (z < 1e-4)
            return (0.5 - z * z / 24.0) * std::pow(z, 1.0 - 2.0 * lambda);
        return (1.0 - std::cos(z)) * std::pow(z, -s);
    };
    double head = 0.0;
    const double breaks[] = {0.0, 1e-4, 0.5, 2.0, M_PI, 2.0 * M_PI, 3.0 * M_PI, a};
    for (std::size_t b = 0; b + 1 < std::size(breaks); ++b)
        head += gauss_kronrod<double, 61>::integrate(near, breaks[b], breaks[b + 1], 15, 1e-14);
    // int_a^inf z^-s dz - int_0^inf cos(a + t) (a + t)^-s dt, with cos(a) = 1, sin(a) = 0.
    const double power_tail = std::pow(a, 1.0 - s) / (s - 1.0);
    boost::math::quadrature::ooura_fourier_cos<double> fcos;
    auto shifted = [&](double t) { return std::pow(a + t, -s); };
    const double cos_tail = fcos.integrate(shifted, 1.0).first;
    return 2.0 * (head + power_tail - cos_tail);
}

/// Closed form of the same symbol: 2 Gamma(1 - 2 lambda) cos(pi lambda) / (2 lambda),
/// with the removable singularity at lambda = 1/2 replaced by its limit pi.
inline double symbol_closed_form(double lambda)
{
    if (std::abs(lambda - 0.5) < 1e-12)
        return M_PI;
    return 2.0 * boost::math::tgamma(1.0 - 2.0 * lambda) * std::cos(M_PI * lambda) / (2.0 * lambda);
}

/// Closed form for the Gaussian with c = 1:
/// L[exp(-x^2)](x) = |Gamma(-lambda)| 1F1(1/2 + lambda; 1/2; -x^2).
inline double gaussian_closed_form(double x, double lambda)
{
    return std::abs(boost::math::tgamma(-lambda)) * boost::math::hypergeometric_1F1(0.5 + lambda, 0.5, -x * x);
}

} // namespace fracshock::oracle
