#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fracshock {

using Field = std::vector<double>;

enum class Boundary { periodic, zero_extension };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

/// Uniform 1-D cell-centred grid on [x_min, x_min + n_cells * dx).
///
/// Under `zero_extension` a field is understood to vanish outside the window;
/// under `periodic` it repeats with period n_cells * dx.
class Grid {
public:
    Grid(std::size_t n_cells, double x_min, double x_max, Boundary boundary);

    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_min_ + static_cast<double>(n_) * dx_; }
    double length() const { return static_cast<double>(n_) * dx_; }
    Boundary boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == Boundary::periodic; }

    double center(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }
    Field centers() const;

    template <class Fn>
    Field sample(Fn&& fn) const
    {
        Field out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            out[i] = fn(center(i));
        return out;
    }

    bool operator==(const Grid& other) const = default;

private:
    std::size_t n_;
    double x_min_;
    double dx_;
    Boundary boundary_;
};

// Discrete norms. The total variation includes the wrap-around jump on
// periodic grids and the jumps to the zero exterior under zero extension.
double l1_norm(std::span<const double> u, const Grid& g);
double l2_norm_sq(std::span<const double> u, const Grid& g);
double total_variation(std::span<const double> u, const Grid& g);
double total_mass(std::span<const double> u, const Grid& g);
double l1_distance(std::span<const double> u, std::span<const double> v, const Grid& g);
double gradient_norm_sq(std::span<const double> u, const Grid& g);

/// Three-point Laplacian with the grid's boundary treatment (zero ghost cells
/// under zero extension).
void laplacian(std::span<const double> u, const Grid& g, std::span<double> out);

void require_same_size(std::span<const double> u, const Grid& g, std::string_view what);

} // namespace fracshock
