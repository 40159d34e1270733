// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracshock/config.hpp"
#include "fracshock/estimates.hpp"
#include "oracles/fractional_oracle.hpp"

namespace fs = std::filesystem;
using namespace fracshock;

namespace {

// ---------------------------------------------------------------- pinned tolerances
constexpr double op_rel_tol = 1e-3;
constexpr double split_tol = 1e-12;
constexpr double bilinear_tol = 1e-12;
constexpr double singular_slope_margin = 0.1;
constexpr double transport_min_order = 0.8;
constexpr double tv_tol = 0.02;
constexpr double l1_ratio_limit = 2.0;
constexpr double energy_ratio_limit = 3.0;
constexpr double contraction_tol = 0.02;
constexpr double rate_min_slope = 0.45;
constexpr double rate_ci_floor = 0.3;
constexpr double cd_slope_tol = 0.05;
constexpr double entropy_quantile = 0.95;

constexpr std::size_t n_cells = 512;
constexpr std::size_t n_paths = 128;
constexpr std::size_t entropy_paths = 64;
constexpr double t_end = 0.5;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::size_t threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::uint64_t> seeds(std::size_t n, std::uint64_t base = 1)
{
    std::vector<std::uint64_t> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = base + i;
    return s;
}

const std::vector<double> eps_sweep{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};

Problem burgers_problem(NoiseSpec noise, double lambda)
{
    Grid g(n_cells, -4.0, 4.0, Boundary::zero_extension);
    Field u0 = g.sample([](double x) { return smooth_bump(x, 0.0, 1.5); });
    return Problem{g, burgers_flux(4.0), ramp_diffusion(0.25, 1.0), std::move(noise), std::move(u0), lambda, 1.0};
}

SolverConfig config(double eps)
{
    SolverConfig c;
    c.epsilon = eps;
    c.t_end = t_end;
    c.r_split = 0.25;
    return c;
}

Field second_datum(const Grid& g)
{
    return g.sample([](double x) { return 0.5 * smooth_bump(x, 0.5, 1.0); });
}

// ---------------------------------------------------------------- criteria

Outcome operator_correctness()
{
    auto gauss = [](double x) { return std::exp(-x * x); };
    auto gauss2 = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
    auto gauss4 = [](double x) { return (16.0 * x * x * x * x - 48.0 * x * x + 12.0) * std::exp(-x * x); };
    const Grid g(512, -8.0, 8.0, Boundary::zero_extension);
    const Field u = g.sample(gauss);
    const Field v = g.sample([](double x) { return std::sin(2.0 * x) * std::exp(-0.5 * x * x); });
    Outcome o{true, ""};
    for (double lambda : {0.25, 0.5, 0.75}) {
        const auto k = build_kernel(g, lambda, 1.0, 0.25);
        const Field lu = apply_full(u, k), s = apply_singular(u, k), r = apply_regular(u, k);
        double err = 0.0, scale = 0.0, split = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double exact = oracle::gaussian_closed_form(g.center(i), lambda);
            err = std::max(err, std::abs(lu[i] - exact));
            scale = std::max(scale, std::abs(exact));
            split = std::max(split, std::abs(lu[i] - s[i] - r[i]));
        }
        // spot checks against the adaptive-quadrature oracle
        double quad_err = 0.0;
        for (std::size_t i : {256u, 300u, 400u}) {
            const double q = oracle::fractional_laplacian(gauss, gauss2, gauss4, g.center(i), lambda);
            quad_err = std::max(quad_err, std::abs(lu[i] - q) / scale);
        }
        const double buv = bilinear_form(u, v, k), bvu = bilinear_form(v, u, k);
        const double sym = std::abs(buv - bvu) / std::max(1.0, std::abs(buv));
        const double pos = std::min(h_lambda_seminorm_sq(u, k), h_lambda_seminorm_sq(v, k));
        const bool ok = err / scale <= op_rel_tol && quad_err <= op_rel_tol && split <= split_tol
                        && sym <= bilinear_tol && pos >= -bilinear_tol;
        o.pass = o.pass && ok;
        o.detail += "lambda " + fmt("%g", lambda) + ": rel " + fmt("%.2e", err / scale) + " quad " +
                    fmt("%.2e", quad_err) + " split " + fmt("%.1e", split) + " sym " + fmt("%.1e", sym) + "; ";
    }
    return o;
}

Outcome singular_part_bound()
{
    const Grid g(2048, -2.0, 2.0, Boundary::zero_extension);
    // C^2 bump (1 - x^2)^3 on [-1, 1]
    const Field phi = g.sample([](double x) {
        const double s = 1.0 - x * x;
        return s > 0.0 ? s * s * s : 0.0;
    });
    Outcome o{true, ""};
    for (double lambda : {0.75, 0.25}) {
        std::vector<double> rs, ms;
        for (double r : {0.25, 0.125, 0.0625, 0.03125}) {
            const auto k = build_kernel(g, lambda, 1.0, r);
            const Field s = apply_singular(phi, k);
            double m = 0.0;
            for (double x : s)
                m = std::max(m, std::abs(x));
            rs.push_back(r);
            ms.push_back(m);
        }
        const double slope = log_log_fit(rs, ms).slope;
        const double need = (lambda > 0.5 ? 2.0 - 2.0 * lambda : 1.0 - 2.0 * lambda) - singular_slope_margin;
        o.pass = o.pass && slope >= need;
        o.detail += "lambda " + fmt("%g", lambda) + ": slope " + fmt("%.3f", slope) + " >= " + fmt("%.2f", need) +
                    "; ";
    }
    return o;
}

Outcome transport_sanity()
{
    std::vector<double> hs, errs;
    for (std::size_t n : {128, 256, 512}) {
        const Grid g(n, 0.0, 2.0 * M_PI, Boundary::periodic);
        auto u0 = [](double x) { return std::sin(x) + 0.5 * std::cos(2.0 * x); };
        Problem p{g, linear_flux(1.0), zero_diffusion(), no_noise(), g.sample(u0), 0.5, 1.0};
        Solver s(p, config(0.0));
        const std::vector<double> at{t_end};
        const Field u = s.run(1, at).snapshots.back();
        // du = +d/dx u dt transports to the left: u(t, x) = u0(x + t)
        const Field exact = g.sample([&](double x) { return u0(x + t_end); });
        hs.push_back(g.dx());
        errs.push_back(l1_distance(u, exact, g));
    }
    const double order = log_log_fit(hs, errs).slope;
    return {order >= transport_min_order,
            "L1 errors " + fmt("%.3e", errs[0]) + ", " + fmt("%.3e", errs[1]) + ", " + fmt("%.3e", errs[2]) +
                "; order " + fmt("%.3f", order) + " >= " + fmt("%.1f", transport_min_order)};
}

Outcome viscous_bounds(const Problem& p)
{
    const ViscousLimits lim{tv_tol, l1_ratio_limit, energy_ratio_limit};
    const auto rep = viscous_estimates(p, config(eps_sweep.front()), eps_sweep, seeds(n_paths), {threads(), 10}, lim);
    double tv_end = 0.0;
    for (const auto& e : rep.entries)
        tv_end = std::max(tv_end, e.tv_mean.back());
    return {rep.pass(), "TV0 " + fmt("%.4f", rep.tv0) + ", max mean TV(T) " + fmt("%.4f", tv_end) + " (TV ok " +
                            (rep.tv_pass ? "yes" : "no") + "); L1 ratio " + fmt("%.4f", rep.l1_ratio) + " <= 2; energy ratio " +
                            fmt("%.4f", rep.energy_ratio) + " <= 3"};
}

Outcome contraction(const Problem& p)
{
    Outcome o{true, ""};
    for (double eps : eps_sweep) {
        const auto rep = l1_contraction(p, second_datum(p.grid), config(eps), seeds(n_paths), contraction_tol,
                                        {threads(), 10});
        double worst = -1e300;
        for (std::size_t t = 0; t < rep.times.size(); ++t)
            worst = std::max(worst, rep.mean[t] - rep.initial_distance * (1.0 + contraction_tol) - 3.0 * rep.se[t]);
        o.pass = o.pass && rep.pass;
        o.detail += "eps " + fmt("%g", eps) + ": d0 " + fmt("%.4f", rep.initial_distance) + ", d(T) " +
                    fmt("%.4f", rep.mean.back()) + ", worst margin " + fmt("%.3e", worst) + "; ";
    }
    return o;
}

Outcome viscosity_rate_check()
{
    const Problem p = burgers_problem(geometric_noise(0.25), 0.5);
    RateOptions ro;
    ro.slope_tol = 0.5 - rate_min_slope;
    ro.ci_floor = rate_ci_floor;
    const auto fit = viscosity_rate(p, config(eps_sweep.front()), eps_sweep, seeds(n_paths), ro, {threads(), 10});
    return {fit.pass && fit.slope >= rate_min_slope && fit.slope_ci.lo > rate_ci_floor,
            "slope " + fmt("%.4f", fit.slope) + " >= 0.45, CI [" + fmt("%.4f", fit.slope_ci.lo) + ", " +
                fmt("%.4f", fit.slope_ci.hi) + "] excludes 0.3, errors " + fmt("%.3e", fit.ordinates.front()) +
                " .. " + fmt("%.3e", fit.ordinates.back()) + (fit.non_monotone ? ", NON-MONOTONE" : "")};
}

Outcome continuous_dependence_check()
{
    const Problem p = burgers_problem(geometric_noise(0.25), 0.5);
    const std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125};
    RateOptions ro;
    ro.slope_tol = cd_slope_tol;
    const auto fit = continuous_dependence(p, tanh_family(p.diffusion, deltas), config(1.0 / 1024), seeds(n_paths),
                                           ro, {threads(), 10});
    const double need = 1.0 / (1.0 + p.lambda) - cd_slope_tol;
    return {fit.pass && fit.slope >= need, "slope " + fmt("%.4f", fit.slope) + " >= " + fmt("%.4f", need) +
                                               ", distances " + fmt("%.3e", fit.ordinates.front()) + " .. " +
                                               fmt("%.3e", fit.ordinates.back())};
}

Outcome entropy_inequality()
{
    const Problem p = burgers_problem(geometric_noise(0.25), 0.5);
    const Solver s(p, config(1.0 / 128));
    EntropyCheckSpec spec;
    spec.phis = test_function_library(p.grid, t_end);
    spec.ks = k_lattice(s.initial_state(), 17);
    spec.deltas = {0.05, 0.025};
    spec.r = 0.25;
    spec.quadrature_dt = 0.01;
    spec.path_quantile = entropy_quantile;
    const auto rep = entropy_residual(s, seeds(entropy_paths), spec, threads());
    double worst = 1e300, min_frac = 1.0;
    for (const auto& c : rep.cases) {
        worst = std::min(worst, c.mean + c.tol + 3.0 * c.se);
        min_frac = std::min(min_frac, c.fraction_above);
    }
    return {rep.pass, std::to_string(rep.cases.size()) + " cases, worst margin " + fmt("%.4f", worst) +
                          ", min fraction above -tol " + fmt("%.3f", min_frac) + ", tol = dx + dt_q + delta + eps with dt_q " +
                          fmt("%.4f", rep.tol_dt)};
}

Outcome space_dependent()
{
    const Problem p = burgers_problem(space_dependent_noise(0.25), 0.3);
    const Outcome v = viscous_bounds(p);
    const Outcome c = contraction(p);
    bool rejected = false;
    std::string msg;
    try {
        parse_config_text("problem.noise = space_dependent\nsolver.lambda = 0.5\n");
    } catch (const ConfigError& e) {
        rejected = true;
        msg = e.messages().front();
    }
    return {v.pass && c.pass && rejected, "estimates: " + std::string(v.pass ? "pass" : "FAIL") + " [" + v.detail +
                                              "]; contraction: " + (c.pass ? "pass" : "FAIL") +
                                              "; lambda 0.5 config rejected: " + (rejected ? "yes" : "NO")};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& n_files)
{
    n_files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const fs::path other = b / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other))
            return false;
        ++n_files;
    }
    std::size_t nb = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(b))
        ++nb;
    return nb == n_files;
}

Outcome determinism(const std::string& cli)
{
    // library level: reports serialised with one and several workers
    const Problem p = burgers_problem(geometric_noise(0.25), 0.5);
    auto report = [&](std::size_t th) {
        const auto rep = l1_contraction(p, second_datum(p.grid), config(1.0 / 32), seeds(16), contraction_tol, {th, 10});
        std::ostringstream os;
        write_csv(os, rep);
        return to_json(rep).dump(2) + os.str();
    };
    const bool lib_same = report(1) == report(4);

    // CLI level: identical output trees for different --threads
    bool cli_same = false;
    std::size_t files = 0;
    if (!cli.empty()) {
        const fs::path root = fs::temp_directory_path() / "fracshock_acceptance";
        fs::remove_all(root);
        fs::create_directories(root);
        const fs::path cfg = root / "det.cfg";
        std::ofstream(cfg) << "grid.n_cells = 256\nsolver.epsilon = 0.03125\nsolver.t_end = 0.25\n"
                              "experiment.seed = 7\nexperiment.paths = 8\noutput.field_paths = 2\n";
        bool ok = true;
        for (const std::string cmd : {"simulate", "contraction"}) {
            for (const char* th : {"1", "3"}) {
                const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + cfg.string() + "\" --threads " + th +
                                         " --out \"" + (root / (cmd + th)).string() + "\" > /dev/null";
                ok = ok && std::system(line.c_str()) == 0;
            }
            std::size_t n = 0;
            ok = ok && same_tree(root / (cmd + "1"), root / (cmd + "3"), n);
            files += n;
        }
        cli_same = ok;
        fs::remove_all(root);
    }
    return {lib_same && cli_same, std::string("library reports identical for 1 vs 4 threads: ") +
                                      (lib_same ? "yes" : "NO") + "; CLI outputs byte-identical for 1 vs 3 threads: " +
                                      (cli_same ? "yes" : "NO") + " (" + std::to_string(files) + " files)"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "";
    const Problem base = burgers_problem(geometric_noise(0.25), 0.5);
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "operator correctness", 5.0, operator_correctness},
        {2, "singular-part bound", 5.0, singular_part_bound},
        {3, "deterministic transport", 10.0, transport_sanity},
        {4, "viscous-solution estimates", 240.0, [&] { return viscous_bounds(base); }},
        {5, "L1 contraction", 120.0, [&] { return contraction(base); }},
        {6, "vanishing-viscosity rate", 300.0, viscosity_rate_check},
        {7, "continuous dependence", 300.0, continuous_dependence_check},
        {8, "entropy inequality", 180.0, entropy_inequality},
        {9, "space-dependent noise", 240.0, space_dependent},
        {10, "determinism", 120.0, [&] { return determinism(cli); }},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %2d %s %s | %s | %.1f s (limit %.0f s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), secs, c.limit_s);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
