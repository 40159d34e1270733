#include "fracshock/fractional_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracshock {

namespace {

// Integrals of the two linear hat halves against s^p over [m, m+1]:
//   left  = int (m+1-s) s^p ds,   right = int (s-m) s^p ds.
struct HatPair {
    double left;
    double right;
};

HatPair hat_integrals(std::size_t m, double p)
{
    const double a = static_cast<double>(m);
    const double b = a + 1.0;
    if (m < 32) {
        const double i0 = (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
        const double i1 = (std::pow(b, p + 2.0) - std::pow(a, p + 2.0)) / (p + 2.0);
        return {b * i0 - i1, i1 - a * i0};
    }
    // Far from the origin s^p is smooth; 4-point Gauss-Legendre is exact to
    // rounding for these intervals.
    static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563,
                                                    0.3399810435848563, 0.8611363115940526};
    static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461,
                                                      0.6521451548625461, 0.3478548451374538};
    HatPair r{0.0, 0.0};
    for (std::size_t q = 0; q < 4; ++q) {
        const double s = a + 0.5 * (nodes[q] + 1.0);
        const double f = 0.5 * weights[q] * std::pow(s, p);
        r.left += (b - s) * f;
        r.right += (s - a) * f;
    }
    return r;
}

void accumulate(std::span<const double> u, std::span<const double> w, std::span<const double> tail,
                bool periodic, std::size_t m_begin, std::size_t m_end, std::span<double> out)
{
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i)
        out[i] = tail[i] * u[i];
    if (periodic) {
        for (std::size_t r = m_begin; r < m_end; ++r) {
            const double wr = w[r];
            if (wr == 0.0)
                continue;
            for (std::size_t i = 0; i + r < n; ++i)
                out[i] += wr * (u[i] - u[i + r]);
            for (std::size_t i = n - r; i < n; ++i)
                out[i] += wr * (u[i] - u[i + r - n]);
        }
    } else {
        for (std::size_t m = m_begin; m < m_end; ++m) {
            const double wm = w[m];
            if (wm == 0.0)
                continue;
            for (std::size_t i = 0; i + m < n; ++i) {
                const double d = u[i] - u[i + m];
                out[i] += wm * d;
                out[i + m] -= wm * d;
            }
        }
    }
}

} // namespace

FractionalKernel::FractionalKernel(const Grid& grid, double lambda, double c_lambda, double r_split)
    : grid_(grid)
    , lambda_(lambda)
    , c_lambda_(c_lambda)
    , r_split_(r_split)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("fractional order lambda must lie in (0,1), got " + std::to_string(lambda));
    if (!(c_lambda > 0.0))
        throw std::invalid_argument("c_lambda must be positive");
    const double h = grid.dx();
    if (!(r_split >= h * (1.0 - 1e-12)))
        throw std::invalid_argument("r_split must be at least dx (" + std::to_string(h)
                                    + "), otherwise the singular part is empty");

    const std::size_t n = grid.size();
    reach_ = static_cast<std::size_t>(std::floor(r_split / h + 1e-9));

    const std::size_t n_line = grid.periodic() ? 64 * n : std::max(n, reach_ + 1) + 1;
    const double p = 1.0 - 2.0 * lambda;

    // a[m] accumulates the quadrature coefficient of G(z_m), in units h^(p+1).
    std::vector<double> a(n_line + 2, 0.0);
    a[1] += 1.0 / (p + 1.0);
    HatPair last{0.0, 0.0};
    for (std::size_t m = 1; m <= n_line; ++m) {
        last = hat_integrals(m, p);
        a[m] += last.left;
        a[m + 1] += last.right;
    }
    // w_m = c a_m h^(p+1) / (m h)^2
    const double scale = c_lambda * std::pow(h, p - 1.0);
    line_.assign(n_line + 1, 0.0);
    for (std::size_t m = 1; m <= n_line; ++m) {
        const double md = static_cast<double>(m);
        line_[m] = scale * a[m] / (md * md);
    }
    {
        // Beyond the last explicit node the interpolant of z^-2 is replaced by
        // z^-2 itself; the relative error is O((1/n_line)^2).
        const double s = static_cast<double>(n_line + 1);
        line_tail_ = scale * (last.right / (s * s) + std::pow(s, p - 1.0) / (1.0 - p));
    }

    w_sing_.assign(n, 0.0);
    w_reg_.assign(n, 0.0);
    tail_sing_.assign(n, 0.0);
    tail_reg_.assign(n, 0.0);

    if (grid.periodic()) {
        // Fold every signed offset +-m onto its residue class; multiples of n
        // are self-images and drop out of u_i - u_j.
        for (std::size_t m = 1; m <= n_line; ++m) {
            const std::size_t r = m % n;
            if (r == 0)
                continue;
            auto& target = m <= reach_ ? w_sing_ : w_reg_;
            target[r] += line_[m];
            target[n - r] += line_[m];
        }
        const double share = 2.0 * line_tail_ / static_cast<double>(n);
        for (std::size_t r = 1; r < n; ++r)
            w_reg_[r] += share;
    } else {
        for (std::size_t m = 1; m < n; ++m)
            (m <= reach_ ? w_sing_ : w_reg_)[m] = line_[m];
        // suffix[m] = sum_{m' >= m} w_m'
        std::vector<double> suffix(n_line + 2, 0.0);
        suffix[n_line + 1] = line_tail_;
        for (std::size_t m = n_line; m >= 1; --m)
            suffix[m] = suffix[m + 1] + line_[m];
        auto side = [&](std::size_t first_exterior, double& sing, double& reg) {
            if (first_exterior <= reach_)
                sing += suffix[first_exterior] - suffix[reach_ + 1];
            reg += suffix[std::max(first_exterior, reach_ + 1)];
        };
        for (std::size_t i = 0; i < n; ++i) {
            side(n - i, tail_sing_[i], tail_reg_[i]);
            side(i + 1, tail_sing_[i], tail_reg_[i]);
        }
    }
}

double FractionalKernel::line_weight(std::size_t m) const
{
    if (m == 0 || m >= line_.size())
        throw std::out_of_range("line_weight offset out of range");
    return line_[m];
}

std::vector<double> FractionalKernel::tail_correction() const
{
    std::vector<double> t(tail_sing_.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = tail_sing_[i] + tail_reg_[i];
    return t;
}

double FractionalKernel::max_row_sum() const
{
    const std::size_t n = grid_.size();
    if (grid_.periodic()) {
        double s = 0.0;
        for (std::size_t r = 1; r < n; ++r)
            s += w_sing_[r] + w_reg_[r];
        return s;
    }
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = tail_sing_[i] + tail_reg_[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
                const std::size_t d = offset(i, j);
                s += w_sing_[d] + w_reg_[d];
            }
        best = std::max(best, s);
    }
    return best;
}

FractionalKernel build_kernel(const Grid& grid, double lambda, double c_lambda, double r_split)
{
    return FractionalKernel(grid, lambda, c_lambda, r_split);
}

Field apply_singular(std::span<const double> u, const FractionalKernel& k)
{
    require_same_size(u, k.grid(), "apply_singular");
    const std::size_t n = u.size();
    Field out(n);
    if (k.grid().periodic())
        accumulate(u, k.weights_singular(), k.tail_singular(), true, 1, n, out);
    else
        accumulate(u, k.weights_singular(), k.tail_singular(), false, 1, std::min(k.singular_reach() + 1, n), out);
    return out;
}

Field apply_regular(std::span<const double> u, const FractionalKernel& k)
{
    require_same_size(u, k.grid(), "apply_regular");
    const std::size_t n = u.size();
    Field out(n);
    const std::size_t begin = k.grid().periodic() ? 1 : std::min(k.singular_reach() + 1, n);
    accumulate(u, k.weights_regular(), k.tail_regular(), k.grid().periodic(), begin, n, out);
    return out;
}

void apply_full(std::span<const double> u, const FractionalKernel& k, std::span<double> out)
{
    const Field s = apply_singular(u, k);
    const Field r = apply_regular(u, k);
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = s[i] + r[i];
}

Field apply_full(std::span<const double> u, const FractionalKernel& k)
{
    Field out(u.size());
    apply_full(u, k, out);
    return out;
}

double bilinear_form(std::span<const double> u, std::span<const double> v, const FractionalKernel& k)
{
    const Grid& g = k.grid();
    require_same_size(u, g, "bilinear_form");
    require_same_size(v, g, "bilinear_form");
    const std::size_t n = u.size();
    const auto ws = k.weights_singular();
    const auto wr = k.weights_regular();
    double pairs = 0.0;
    if (g.periodic()) {
        // Ordered pairs (i, i+r mod n) visit each unordered pair twice.
        for (std::size_t r = 1; r < n; ++r) {
            const double w = ws[r] + wr[r];
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = i + r < n ? i + r : i + r - n;
                s += (u[i] - u[j]) * (v[i] - v[j]);
            }
            pairs += 0.5 * w * s;
        }
    } else {
        for (std::size_t m = 1; m < n; ++m) {
            const double w = ws[m] + wr[m];
            double s = 0.0;
            for (std::size_t i = 0; i + m < n; ++i)
                s += (u[i] - u[i + m]) * (v[i] - v[i + m]);
            pairs += w * s;
        }
    }
    const auto ts = k.tail_singular();
    const auto tr = k.tail_regular();
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        diag += (ts[i] + tr[i]) * (u[i] * v[i]);
    return (pairs + diag) * g.dx();
}

double h_lambda_seminorm_sq(std::span<const double> u, const FractionalKernel& k)
{
    return bilinear_form(u, u, k);
}

} // namespace fracshock
