#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracshock/entropy_check.hpp"
#include "fracshock/solver.hpp"
#include "fracshock/stats.hpp"

namespace fracshock {

struct RunOptions {
    std::size_t threads = 1;
    /// Snapshot intervals on [0, T] for time-resolved reports.
    std::size_t snapshot_intervals = 10;
};

// ---------------------------------------------------------------- contraction

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> se;
    double initial_distance = 0.0;
    double tol = 0.0;
    std::size_t n_paths = 0;
    bool pass = false;
};

/// Coupled ensembles from problem.u0 and v0 driven by identical paths.
/// Passes iff mean ||u(t) - v(t)||_1 <= ||u0 - v0||_1 (1 + tol) + 3 SE at every snapshot.
ContractionReport l1_contraction(const Problem& problem, std::span<const double> v0, const SolverConfig& config,
                                 std::span<const std::uint64_t> seeds, double tol = 0.02, const RunOptions& opt = {});

// ---------------------------------------------------------------- rate fits

struct RateFit {
    std::string abscissa_name;
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    std::vector<double> ses;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Interval slope_ci;
    double threshold = 0.0;   // required slope before slope_tol
    double slope_tol = 0.05;
    double ci_floor = -std::numeric_limits<double>::infinity();
    bool grid_limited = false;
    bool non_monotone = false;
    std::vector<std::string> notes;
    std::size_t n_paths = 0;
    bool pass = false;
};

/// Requires >= 4 strictly decreasing abscissae with a constant ratio >= `min_ratio`.
void check_geometric(std::span<const double> xs, double min_ratio, const std::string& what);

/// Fills slope, intercept, r^2, bootstrap CI and the monotonicity flag.
/// `samples[j][p]` are the per-path ordinates at abscissa j.
void fit_rate(RateFit& fit, const std::vector<std::vector<double>>& samples, std::size_t bootstrap_replicates,
              std::uint64_t bootstrap_seed);

struct RateOptions {
    double slope_tol = 0.05;
    /// Bootstrap CI lower end must exceed this (viscosity rate only).
    double ci_floor = 0.3;
    /// Reference viscosity as a fraction of min(eps_list); at most 1/8.
    double ref_fraction = 0.125;
    std::size_t bootstrap_replicates = 1000;
    std::uint64_t bootstrap_seed = 20240601;
};

/// Coupled-path L1 error ||u_eps(T) - u_ref(T)|| against eps; expects slope >= 1/2 - slope_tol.
RateFit viscosity_rate(const Problem& problem, const SolverConfig& config, std::span<const double> eps_list,
                       std::span<const std::uint64_t> seeds, const RateOptions& ro = {}, const RunOptions& opt = {});

/// sup over |u| <= range of |A'(u) - B'(u)|, sampled on 20001 points.
double sup_derivative_gap(const DiffusionSpec& a, const DiffusionSpec& b, double range);

/// Coupled ensembles for A and each B_j; fits the L1 distance at T (minus the
/// B = A baseline) against ||A' - B_j'||; expects slope >= 1/(1+lambda) - slope_tol.
RateFit continuous_dependence(const Problem& problem_a, const std::vector<DiffusionSpec>& family,
                              const SolverConfig& config, std::span<const std::uint64_t> seeds,
                              const RateOptions& ro = {}, const RunOptions& opt = {});

/// Family B_j = A + delta_j tanh(u).
std::vector<DiffusionSpec> tanh_family(const DiffusionSpec& a, std::span<const double> deltas);

// ---------------------------------------------------------------- viscous estimates

struct SweepEntry {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> tv_mean, tv_se;
    std::vector<double> l1_mean, l1_se;
    double sup_l2 = 0.0;          // sup_t E ||u(t)||_2^2
    double viscous_dissipation = 0.0;   // eps int E ||grad u||^2 dt
    double nonlocal_energy = 0.0;       // int E <L A(u), A(u)> dt
    double energy_total() const { return sup_l2 + viscous_dissipation + nonlocal_energy; }
    double l1_constant = 0.0;     // max_t E||u(t)||_1 / ||u0||_1
    bool tv_pass = false;
};

struct ViscousReport {
    std::vector<SweepEntry> entries;
    double tv0 = 0.0;
    double l10 = 0.0;
    double tv_tol = 0.02;
    double l1_ratio = 0.0;         // max/min of l1_constant over the sweep
    double l1_ratio_limit = 2.0;
    double energy_ratio = 0.0;     // max/min of energy_total over the sweep
    double energy_ratio_limit = 3.0;
    std::size_t n_paths = 0;
    bool tv_pass = false;
    bool l1_pass = false;
    bool energy_pass = false;
    bool pass() const { return tv_pass && l1_pass && energy_pass; }
};

struct ViscousLimits {
    double tv_tol = 0.02;
    double l1_ratio_limit = 2.0;
    double energy_ratio_limit = 3.0;
};

/// Runs the eps sweep (independent runs per eps, same seeds) and evaluates the
/// TV bound, the uniform L1 bound and the energy triple sum.
ViscousReport viscous_estimates(const Problem& problem, const SolverConfig& config, std::span<const double> eps_list,
                                std::span<const std::uint64_t> seeds, const RunOptions& opt = {},
                                const ViscousLimits& limits = {});

// ---------------------------------------------------------------- serialisation

nlohmann::json to_json(const ContractionReport& r);
nlohmann::json to_json(const RateFit& r);
nlohmann::json to_json(const ViscousReport& r);
nlohmann::json to_json(const EntropyReport& r);
nlohmann::json to_json(const EntropyResidual& r);

/// CSV tables: one row per (abscissa or time) with mean and se.
void write_csv(std::ostream& os, const ContractionReport& r);
void write_csv(std::ostream& os, const RateFit& r);
void write_csv(std::ostream& os, const ViscousReport& r);
void write_csv(std::ostream& os, const EntropyReport& r);

/// 17 significant digits, so every double round-trips.
std::string format_double(double v);

} // namespace fracshock
