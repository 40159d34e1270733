#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracshock/solver.hpp"

namespace fracshock {

/// phi(t, x) = psi(x) (1 - t/T)^2 with psi a C-infinity bump of half-width
/// `half_width` centred at `center`. Nonnegative, compactly supported and
/// vanishing at t = T.
struct TestFunction {
    std::string id;
    double center = 0.0;
    double half_width = 1.0;
    double t_end = 1.0;

    double psi(double x) const;
    double psi_x(double x) const;
    double time_factor(double t) const;
    double time_factor_dt(double t) const;

    double phi(double t, double x) const { return psi(x) * time_factor(t); }
    double dphi_dt(double t, double x) const { return psi(x) * time_factor_dt(t); }
    double dphi_dx(double t, double x) const { return psi_x(x) * time_factor(t); }
};

/// Four bumps placed inside the window: a wide central one, two off-centre
/// ones and a narrow central one.
std::vector<TestFunction> test_function_library(const Grid& grid, double t_end);

/// Throws if the support of phi (widened by `margin`) reaches the window edge.
void check_support(const TestFunction& phi, const Grid& grid, double margin);

/// 17 (by default) equispaced Kruzkov levels spanning [min u0 - pad, max u0 + pad].
std::vector<double> k_lattice(std::span<const double> u0, std::size_t count = 17, double pad = 0.1);

struct EntropyTerms {
    double initial = 0.0;
    double time = 0.0;
    double flux = 0.0;
    double martingale = 0.0;
    double ito = 0.0;
    double nonlocal_regular = 0.0;
    double nonlocal_singular = 0.0;

    double total() const
    {
        return initial + time + flux + martingale + ito + nonlocal_regular + nonlocal_singular;
    }
};

inline constexpr const char* entropy_term_names[] = {"initial", "time", "flux", "martingale",
                                                     "ito", "nonlocal_regular", "nonlocal_singular"};

struct EntropyCase {
    std::size_t phi_index = 0;
    double k = 0.0;
    double delta = 0.0;
};

struct EntropyCheckSpec {
    std::vector<TestFunction> phis;
    std::vector<double> ks;
    std::vector<double> deltas;
    /// Split radius of the inequality (independent of the solver's r_split).
    double r = 0.25;
    /// Step of the time quadrature for the flux, time and nonlocal terms,
    /// rounded to a multiple of the solver step. The martingale and Ito
    /// terms always use every solver step.
    double quadrature_dt = 0.01;
    /// Tolerance constant: tol = tol_constant * (dx + dt_q + delta + eps).
    double tol_constant = 1.0;
    double path_quantile = 0.95;

    std::vector<EntropyCase> cases() const;
};

/// Accumulates every entropy case on one path from solver step views.
class EntropyAccumulator {
public:
    EntropyAccumulator(const Solver& solver, const EntropyCheckSpec& spec);

    /// Feed as a StepObserver; call finish() after the run.
    void observe(const StepView& v);
    /// Per-case term values of this path.
    const std::vector<EntropyTerms>& terms() const { return terms_; }
    std::size_t stride() const { return stride_; }

private:
    const Solver* solver_;
    const EntropyCheckSpec* spec_;
    std::vector<EntropyCase> cases_;
    std::shared_ptr<const FractionalKernel> kernel_;
    std::size_t stride_ = 1;
    std::size_t lo_ = 0, hi_ = 0;          // union of psi supports (cell range)
    std::size_t lo_s_ = 0, hi_s_ = 0;      // union of L_r psi supports
    std::vector<Field> psi_, psi_x_, lr_psi_;
    Field x_, lreg_;
    std::vector<EntropyTerms> terms_;
};

struct EntropyResidual {
    std::string phi_id;
    double k = 0.0;
    double delta = 0.0;
    double r = 0.0;
    double mean = 0.0;
    double se = 0.0;
    double tol = 0.0;
    /// term name -> (mean, se)
    std::map<std::string, std::pair<double, double>> terms;
    std::vector<double> per_path;
    double fraction_above = 0.0;
    bool pass = false;
};

struct EntropyReport {
    std::vector<EntropyResidual> cases;
    double tol_dx = 0.0, tol_dt = 0.0, epsilon = 0.0;
    std::size_t n_paths = 0;
    bool pass = false;
};

/// Runs one path per seed and evaluates every (phi, k, delta) case.
EntropyReport entropy_residual(const Solver& solver, std::span<const std::uint64_t> seeds,
                               const EntropyCheckSpec& spec, std::size_t threads = 1);

struct KatoResidual {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> per_path;
    EntropyTerms terms;  // initial, time, flux and nonlocal_regular (full operator) are used
};

/// Final Kato inequality for coupled trajectory pairs (same path per index):
///   int |u0 - v0| phi(0) + int int [ |u-v| phi_t - F(u,v) phi_x - |A(u)-A(v)| L[phi] ].
/// Snapshots must be no further apart than `max_quadrature_dt`.
KatoResidual kato_residual(std::span<const Trajectory> us, std::span<const Trajectory> vs, const Problem& problem,
                           const FractionalKernel& kernel, const TestFunction& phi, double max_quadrature_dt = 0.02);

} // namespace fracshock
