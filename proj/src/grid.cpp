#include "fracshock/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracshock {

std::string_view to_string(Boundary b)
{
    return b == Boundary::periodic ? "periodic" : "zero-extension";
}

Boundary boundary_from_string(std::string_view s)
{
    if (s == "periodic")
        return Boundary::periodic;
    if (s == "zero-extension" || s == "zero_extension")
        return Boundary::zero_extension;
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "' (expected periodic or zero-extension)");
}

Grid::Grid(std::size_t n_cells, double x_min, double x_max, Boundary boundary)
    : n_(n_cells)
    , x_min_(x_min)
    , dx_((x_max - x_min) / static_cast<double>(n_cells))
    , boundary_(boundary)
{
    if (n_cells < 4)
        throw std::invalid_argument("grid needs at least 4 cells, got " + std::to_string(n_cells));
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
        throw std::invalid_argument("grid window must satisfy x_min < x_max");
}

Field Grid::centers() const
{
    Field x(n_);
    for (std::size_t i = 0; i < n_; ++i)
        x[i] = center(i);
    return x;
}

void require_same_size(std::span<const double> u, const Grid& g, std::string_view what)
{
    if (u.size() != g.size())
        throw std::invalid_argument(std::string(what) + ": field has " + std::to_string(u.size())
                                    + " cells but grid has " + std::to_string(g.size()));
}

double l1_norm(std::span<const double> u, const Grid& g)
{
    require_same_size(u, g, "l1_norm");
    double s = 0.0;
    for (double v : u)
        s += std::abs(v);
    return s * g.dx();
}

double l2_norm_sq(std::span<const double> u, const Grid& g)
{
    require_same_size(u, g, "l2_norm_sq");
    double s = 0.0;
    for (double v : u)
        s += v * v;
    return s * g.dx();
}

double total_mass(std::span<const double> u, const Grid& g)
{
    require_same_size(u, g, "total_mass");
    double s = 0.0;
    for (double v : u)
        s += v;
    return s * g.dx();
}

double l1_distance(std::span<const double> u, std::span<const double> v, const Grid& g)
{
    require_same_size(u, g, "l1_distance");
    require_same_size(v, g, "l1_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += std::abs(u[i] - v[i]);
    return s * g.dx();
}

double total_variation(std::span<const double> u, const Grid& g)
{
    require_same_size(u, g, "total_variation");
    const std::size_t n = u.size();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        s += std::abs(u[i + 1] - u[i]);
    if (g.periodic())
        s += std::abs(u[0] - u[n - 1]);
    else
        s += std::abs(u[0]) + std::abs(u[n - 1]);
    return s;
}

double gradient_norm_sq(std::span<const double> u, const Grid& g)
{
    require_same_size(u, g, "gradient_norm_sq");
    const std::size_t n = u.size();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = u[i + 1] - u[i];
        s += d * d;
    }
    if (g.periodic()) {
        const double d = u[0] - u[n - 1];
        s += d * d;
    } else {
        s += u[0] * u[0] + u[n - 1] * u[n - 1];
    }
    return s / g.dx();
}

void laplacian(std::span<const double> u, const Grid& g, std::span<double> out)
{
    require_same_size(u, g, "laplacian");
    const std::size_t n = u.size();
    const double inv = 1.0 / (g.dx() * g.dx());
    const double left_ghost = g.periodic() ? u[n - 1] : 0.0;
    const double right_ghost = g.periodic() ? u[0] : 0.0;
    out[0] = (left_ghost - 2.0 * u[0] + u[1]) * inv;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv;
    out[n - 1] = (u[n - 2] - 2.0 * u[n - 1] + right_ghost) * inv;
}

} // namespace fracshock
