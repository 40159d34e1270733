#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracshock/fractional_ops.hpp"
#include "fracshock/grid.hpp"
#include "fracshock/model.hpp"
#include "fracshock/stats.hpp"
#include "fracshock/stochastic.hpp"

namespace fracshock {

enum class ConvectiveScheme { engquist_osher, lax_friedrichs };

std::string_view to_string(ConvectiveScheme s);
ConvectiveScheme scheme_from_string(std::string_view s);

struct SolverConfig {
    double epsilon = 0.0;
    /// Time step; 0 selects stable_dt automatically.
    double dt = 0.0;
    double t_end = 0.5;
    double cfl_safety = 0.9;
    ConvectiveScheme scheme = ConvectiveScheme::engquist_osher;
    double r_split = 0.25;
    /// Replace u0 by the solution of (I - eps Delta_h) v = u0 before stepping.
    bool mollify_initial = true;
};

struct Problem {
    Grid grid;
    FluxSpec flux;
    DiffusionSpec diffusion;
    NoiseSpec noise;
    Field u0;
    double lambda = 0.5;
    double c_lambda = 1.0;
};

/// Throws std::invalid_argument listing every inconsistency of the problem.
void validate_problem(const Problem& p);

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::uint64_t path_seed = 0;
    double dt = 0.0;
    std::size_t n_steps = 0;
};

/// Raised when a step produces a non-finite value or leaves the flux range.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solves (I - eps Delta_h) v = u0 with the grid's boundary treatment.
Field mollify_initial(std::span<const double> u0, double epsilon, const Grid& grid);

/// cfl_safety / (2 eps/dx^2 + Lip(f)/dx + Lip(A) W_row), W_row the largest
/// kernel row sum. Keeps every diagonal coefficient of the explicit update
/// nonnegative, which makes the deterministic part monotone.
double stable_dt(const SolverConfig& config, const FluxSpec& flux, const DiffusionSpec& diff,
                 const FractionalKernel& kernel, const Grid& grid);

/// Numerical flux h(a, b) at an interface with left state a and right state b
/// for the term +d/dx f(u): (h_{i+1/2} - h_{i-1/2}) / dx.
double numerical_flux(double a, double b, const FluxSpec& flux, ConvectiveScheme scheme);

/// Conservative difference of the numerical flux; the exterior is zero under
/// zero extension.
void convective_divergence(std::span<const double> u, const FluxSpec& flux, ConvectiveScheme scheme,
                           const Grid& grid, std::span<double> out);
Field convective_divergence(std::span<const double> u, const FluxSpec& flux, ConvectiveScheme scheme,
                            const Grid& grid);

/// State at the beginning of a step, handed to observers before the update.
struct StepView {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    std::span<const double> u;
    std::span<const double> A_u;
    std::span<const double> L_A_u;      // apply_full(A(u))
    std::span<const double> noise_inc;  // sum_k g_k(x, u) dbeta_k
    std::span<const double> dbeta;
};

using StepObserver = std::function<void(const StepView&)>;

/// Explicit Euler-Maruyama integrator for
///   du = [eps Delta u + d/dx f(u) - L[A(u)]] dt + sum_k g_k(x, u) dbeta_k.
class Solver {
public:
    Solver(Problem problem, SolverConfig config);
    /// Shares an existing kernel (must match grid, lambda, c_lambda, r_split).
    Solver(Problem problem, SolverConfig config, std::shared_ptr<const FractionalKernel> kernel);

    const Problem& problem() const { return problem_; }
    const SolverConfig& config() const { return config_; }
    const FractionalKernel& kernel() const { return *kernel_; }
    std::shared_ptr<const FractionalKernel> shared_kernel() const { return kernel_; }
    /// Bound from stable_dt for this problem.
    double stability_bound() const { return dt_bound_; }
    /// Step actually used: t_end / n_steps with n_steps = ceil(t_end / dt_requested).
    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }

    /// Initial state after optional mollification.
    Field initial_state() const;

    /// One step in place. `step_index` only feeds diagnostics.
    void step(Field& u, std::span<const double> dbeta, std::size_t step_index = 0,
              const StepObserver& observer = {});

    /// Integrates to t_end. Snapshots are taken at the step nearest to each
    /// requested time (t = 0 and t_end always included when requested).
    Trajectory run(const WienerPath& path, std::span<const double> snapshot_times,
                   const StepObserver& observer = {});
    Trajectory run(std::uint64_t seed, std::span<const double> snapshot_times, const StepObserver& observer = {});

    WienerPath path_for(std::uint64_t seed) const;

private:
    void init();

    Problem problem_;
    SolverConfig config_;
    std::shared_ptr<const FractionalKernel> kernel_;
    Field x_;
    double dt_bound_ = 0.0;
    double dt_ = 0.0;
    std::size_t n_steps_ = 0;
    // scratch
    Field a_u_, l_a_u_, lap_, conv_, noise_;
};

/// Smallest stable step over several problem/config pairs, so coupled runs
/// can share one Wiener path.
double common_stable_dt(std::span<const Problem> problems, std::span<const SolverConfig> configs);

/// Functional evaluated on a state (e.g. L1 norm, TV).
using Functional = std::function<double(std::span<const double>, const Grid&)>;

struct EnsembleSummary {
    std::size_t n_paths = 0;
    std::vector<double> times;
    std::vector<std::string> names;
    /// mean[f][t], se[f][t]
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> se;
    /// samples[f][t][path], seed order
    std::vector<std::vector<std::vector<double>>> samples;
};

/// Runs one path per seed (up to `threads` concurrently) and aggregates the
/// functionals at the snapshot times in seed order.
EnsembleSummary run_ensemble(const Solver& prototype, std::span<const std::uint64_t> seeds,
                             std::span<const double> snapshot_times,
                             const std::vector<std::pair<std::string, Functional>>& functionals,
                             std::size_t threads = 1);

/// Snapshot times 0, T/m, ..., T.
std::vector<double> uniform_times(double t_end, std::size_t intervals);

// Trajectory export.
void write_csv(std::ostream& os, const Trajectory& traj, const Grid& grid);
/// Binary layout (little endian): char[8] "FRSHTRAJ", uint32 version = 1,
/// uint64 n_cells, uint64 n_snapshots, then per snapshot one double time
/// followed by n_cells doubles.
void write_binary(std::ostream& os, const Trajectory& traj, const Grid& grid);
Trajectory read_binary(std::istream& is);

} // namespace fracshock
