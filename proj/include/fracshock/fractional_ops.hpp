#pragma once

#include <span>
#include <vector>

#include "fracshock/grid.hpp"

namespace fracshock {

/// Discretisation of the fractional Laplacian of order lambda,
///
///     (L u)(x) = c * P.V. int (u(x) - u(x+z)) |z|^(-1-2 lambda) dz,
///
/// split at |z| = r into a singular (|z| <= r) and a regular (|z| > r) part.
///
/// The quadrature writes the symmetric second difference
/// D(z) = 2u(x) - u(x+z) - u(x-z) as z^2 G(z) and integrates the piecewise
/// linear interpolant of G against z^(1-2 lambda) exactly (G held constant
/// on the first cell). That yields one nonnegative weight per grid offset and
/// second-order consistency for every lambda in (0,1).
///
/// Weights are indexed by the cell offset d(i,j): |i-j| under zero extension,
/// (j-i) mod n on periodic grids (where all periodic images are folded in).
/// Offsets falling outside a zero-extended window act on the zero exterior and
/// are collected into per-cell tail coefficients.
class FractionalKernel {
public:
    FractionalKernel(const Grid& grid, double lambda, double c_lambda, double r_split);

    const Grid& grid() const { return grid_; }
    double lambda() const { return lambda_; }
    double c_lambda() const { return c_lambda_; }
    double r_split() const { return r_split_; }
    /// Largest offset (in cells) assigned to the singular part.
    std::size_t singular_reach() const { return reach_; }

    // Per-offset weights, index 0 unused.
    std::span<const double> weights_singular() const { return w_sing_; }
    std::span<const double> weights_regular() const { return w_reg_; }
    // Per-cell weight of the zero exterior (all zero on periodic grids).
    std::span<const double> tail_singular() const { return tail_sing_; }
    std::span<const double> tail_regular() const { return tail_reg_; }
    /// Total exterior weight per cell, i.e. apply_full(1) under zero extension.
    std::vector<double> tail_correction() const;

    /// Weight of a single grid offset at distance m*dx on the infinite line.
    double line_weight(std::size_t m) const;

    /// Maximum over cells of the row sum of all weights including the tail.
    double max_row_sum() const;

    std::size_t offset(std::size_t i, std::size_t j) const
    {
        const std::size_t n = grid_.size();
        if (grid_.periodic())
            return j >= i ? j - i : j + n - i;
        return i > j ? i - j : j - i;
    }

private:
    Grid grid_;
    double lambda_;
    double c_lambda_;
    double r_split_;
    std::size_t reach_;
    std::vector<double> line_;      // line weights w_m, m = 0..n_line (index 0 unused)
    double line_tail_;              // sum of w_m over m > n_line
    std::vector<double> w_sing_;
    std::vector<double> w_reg_;
    std::vector<double> tail_sing_;
    std::vector<double> tail_reg_;
};

FractionalKernel build_kernel(const Grid& grid, double lambda, double c_lambda, double r_split);

Field apply_singular(std::span<const double> u, const FractionalKernel& k);
Field apply_regular(std::span<const double> u, const FractionalKernel& k);
/// apply_singular(u) + apply_regular(u), summed component-wise.
Field apply_full(std::span<const double> u, const FractionalKernel& k);
void apply_full(std::span<const double> u, const FractionalKernel& k, std::span<double> out);

/// Gagliardo-type double sum
///     1/2 sum_{i != j} W_ij (u_i - u_j)(v_i - v_j) dx + sum_i tail_i u_i v_i dx,
/// which equals sum_i (L u)_i v_i dx for the same weights.
double bilinear_form(std::span<const double> u, std::span<const double> v, const FractionalKernel& k);
double h_lambda_seminorm_sq(std::span<const double> u, const FractionalKernel& k);

} // namespace fracshock
