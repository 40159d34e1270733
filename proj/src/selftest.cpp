#include "fracshock/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "fracshock/config.hpp"
#include "fracshock/entropy_check.hpp"
#include "fracshock/estimates.hpp"

namespace fracshock {

bool SelfTestReport::pass() const
{
    return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

namespace {

void at_most(SelfTestReport& r, std::string name, double value, double limit)
{
    r.items.push_back({std::move(name), value, limit, "<=", value <= limit});
}

void at_least(SelfTestReport& r, std::string name, double value, double limit)
{
    r.items.push_back({std::move(name), value, limit, ">=", value >= limit});
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Integral of (1 - cos z) |z|^(-1-2 lambda) over the real line.
double sine_symbol(double lambda)
{
    if (std::abs(lambda - 0.5) < 1e-12)
        return M_PI;
    return 2.0 * std::tgamma(1.0 - 2.0 * lambda) * std::cos(M_PI * lambda) / (2.0 * lambda);
}

Problem bump_problem(std::size_t n, NoiseSpec noise)
{
    Grid g(n, -4.0, 4.0, Boundary::zero_extension);
    Field u0 = g.sample([](double x) { return smooth_bump(x, 0.0, 1.5); });
    return Problem{g, burgers_flux(4.0), ramp_diffusion(0.25, 1.0), std::move(noise), std::move(u0), 0.5, 1.0};
}

} // namespace

SelfTestReport run_selftest(std::size_t threads)
{
    SelfTestReport r;

    // operator identities
    {
        Grid g(256, -8.0, 8.0, Boundary::zero_extension);
        const Field u = g.sample([](double x) { return std::exp(-x * x); });
        const Field v = g.sample([](double x) { return std::sin(x) * std::exp(-0.25 * x * x); });
        for (double lambda : {0.25, 0.5, 0.75}) {
            const auto k = build_kernel(g, lambda, 1.0, 0.25);
            const Field full = apply_full(u, k), s = apply_singular(u, k), reg = apply_regular(u, k);
            double split = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                split = std::max(split, std::abs(full[i] - s[i] - reg[i]));
                scale = std::max(scale, std::abs(full[i]));
            }
            const std::string tag = " (lambda " + format_double(lambda) + ")";
            at_most(r, "split identity" + tag, split / scale, 1e-12);
            const double buv = bilinear_form(u, v, k), bvu = bilinear_form(v, u, k);
            at_most(r, "bilinear symmetry" + tag, std::abs(buv - bvu) / std::max(1.0, std::abs(buv)), 1e-12);
            at_least(r, "bilinear positivity" + tag, h_lambda_seminorm_sq(v, k), -1e-12);
        }
    }
    // closed-form symbol on a periodic sine
    for (double lambda : {0.25, 0.75}) {
        Grid g(512, 0.0, 2.0 * M_PI, Boundary::periodic);
        const auto k = build_kernel(g, lambda, 1.0, 0.5);
        const Field u = g.sample([](double x) { return std::sin(x); });
        const Field lu = apply_full(u, k);
        const double sym = sine_symbol(lambda);
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            e = std::max(e, std::abs(lu[i] - sym * u[i]));
        at_most(r, "sine symbol relative error (lambda " + format_double(lambda) + ")", e / sym, 1e-3);
    }
    // numerical flux consistency and monotonicity
    {
        const auto f = burgers_flux(4.0);
        double cons = 0.0, mono = 0.0;
        for (int i = -20; i <= 20; ++i) {
            const double a = 0.2 * i;
            cons = std::max(cons, std::abs(numerical_flux(a, a, f, ConvectiveScheme::engquist_osher) - f.f(a)));
            for (int j = -20; j <= 20; ++j) {
                const double b = 0.2 * j, h = 1e-3;
                const double da = numerical_flux(a + h, b, f, ConvectiveScheme::engquist_osher)
                                  - numerical_flux(a, b, f, ConvectiveScheme::engquist_osher);
                const double db = numerical_flux(a, b + h, f, ConvectiveScheme::engquist_osher)
                                  - numerical_flux(a, b, f, ConvectiveScheme::engquist_osher);
                mono = std::max({mono, da, -db});
            }
        }
        at_most(r, "Engquist-Osher consistency h(a,a) = f(a)", cons, 1e-12);
        at_most(r, "Engquist-Osher monotonicity violation", mono, 1e-12);
    }
    // linear transport order
    {
        std::vector<double> hs, errs;
        for (std::size_t n : {64, 128, 256}) {
            Grid g(n, 0.0, 2.0 * M_PI, Boundary::periodic);
            Problem p{g, linear_flux(1.0), zero_diffusion(), no_noise(),
                      g.sample([](double x) { return std::sin(x); }), 0.5, 1.0};
            SolverConfig c;
            c.t_end = 0.5;
            Solver s(p, c);
            const std::vector<double> at{c.t_end};
            const Field u = s.run(1, at).snapshots.back();
            const Field exact = g.sample([&](double x) { return std::sin(x + c.t_end); });
            hs.push_back(g.dx());
            errs.push_back(l1_distance(u, exact, g));
        }
        at_least(r, "linear transport L1 order", log_log_fit(hs, errs).slope, 0.8);
    }
    // determinism across runs and thread counts
    {
        Problem p = bump_problem(128, geometric_noise(0.25));
        SolverConfig c;
        c.epsilon = 0.02;
        c.t_end = 0.25;
        Solver s(p, c);
        const auto times = uniform_times(c.t_end, 5);
        const auto a = s.run(42, times), b = s.run(42, times);
        double d = 0.0;
        for (std::size_t t = 0; t < a.snapshots.size(); ++t)
            d = std::max(d, max_abs_diff(a.snapshots[t], b.snapshots[t]));
        at_most(r, "same seed bit-identical", d, 0.0);
        std::vector<std::uint64_t> seeds(8);
        for (std::size_t i = 0; i < seeds.size(); ++i)
            seeds[i] = 100 + i;
        const std::vector<std::pair<std::string, Functional>> fs{{"l1", l1_norm}};
        const auto e1 = run_ensemble(s, seeds, times, fs, 1);
        const auto e2 = run_ensemble(s, seeds, times, fs, std::max<std::size_t>(2, threads));
        at_most(r, "ensemble independent of thread count", max_abs_diff(e1.mean[0], e2.mean[0]), 0.0);
    }
    // Wiener increments: zero mean and variance dt
    {
        const double dt = 1e-3;
        const auto path = sample_path(7, 4000, 4, dt);
        const auto ms = mean_se(path.increments);
        at_most(r, "Wiener increment mean / SE", std::abs(ms.mean) / ms.se, 4.0);
        const double n = static_cast<double>(path.increments.size());
        at_most(r, "Wiener increment variance / dt deviation in SDs",
                std::abs(ms.std * ms.std / dt - 1.0) / std::sqrt(2.0 / n), 4.0);
    }
    // mass is a martingale; entropy martingale term has zero mean
    {
        Problem p = bump_problem(64, geometric_noise(0.25));
        SolverConfig c;
        c.epsilon = 0.02;
        c.t_end = 0.25;
        Solver s(p, c);
        std::vector<std::uint64_t> seeds(64);
        for (std::size_t i = 0; i < seeds.size(); ++i)
            seeds[i] = 1000 + i;
        // mass is only conserved without outflow through the window edges
        Grid pg(64, 0.0, 2.0 * M_PI, Boundary::periodic);
        Problem pp{pg, burgers_flux(4.0), ramp_diffusion(0.25, 1.0), geometric_noise(0.25),
                   pg.sample([](double x) { return std::sin(x) + 0.3; }), 0.5, 1.0};
        Solver ps(pp, c);
        const std::vector<double> at{0.0, c.t_end};
        const std::vector<std::pair<std::string, Functional>> fs{{"mass", total_mass}};
        const auto e = run_ensemble(ps, seeds, at, fs, threads);
        const double m0 = total_mass(ps.initial_state(), pg);
        at_most(r, "mean mass drift / SE (periodic)", std::abs(e.mean[0][1] - m0) / std::max(e.se[0][1], 1e-300),
                4.0);

        EntropyCheckSpec spec;
        spec.phis = test_function_library(p.grid, c.t_end);
        spec.ks = k_lattice(s.initial_state(), 5);
        spec.deltas = {0.05};
        spec.quadrature_dt = c.t_end / 16.0;
        const auto rep = entropy_residual(s, seeds, spec, threads);
        double worst = 0.0;
        for (const auto& cs : rep.cases) {
            const auto [m, se] = cs.terms.at("martingale");
            worst = std::max(worst, std::abs(m) / std::max(se, 1e-300));
        }
        at_most(r, "entropy martingale term mean / SE (worst case)", worst, 4.0);
    }
    // deterministic L1 contraction, pathwise
    {
        Problem p = bump_problem(128, no_noise());
        SolverConfig c;
        c.epsilon = 0.01;
        c.t_end = 0.25;
        const Field v0 = p.grid.sample([](double x) { return 0.5 * smooth_bump(x, 0.5, 1.0); });
        const std::vector<std::uint64_t> seeds{1};
        const auto rep = l1_contraction(p, v0, c, seeds, 0.0);
        double growth = 0.0;
        for (std::size_t t = 1; t < rep.mean.size(); ++t)
            growth = std::max(growth, rep.mean[t] - rep.mean[t - 1]);
        at_most(r, "deterministic L1 distance increase", growth, 1e-12);
    }
    // config rejection
    {
        bool rejected = false;
        try {
            parse_config_text("problem.space_dependent = true\nsolver.lambda = 0.6\n");
        } catch (const ConfigError&) {
            rejected = true;
        }
        at_least(r, "space-dependent noise with lambda >= 1/2 rejected", rejected ? 1.0 : 0.0, 1.0);
    }
    return r;
}

nlohmann::json to_json(const SelfTestReport& r)
{
    nlohmann::json items = nlohmann::json::array();
    for (const auto& i : r.items)
        items.push_back(
            {{"name", i.name}, {"value", i.value}, {"limit", i.limit}, {"relation", i.relation}, {"pass", i.pass}});
    return {{"kind", "selftest"}, {"items", items}, {"pass", r.pass()}};
}

} // namespace fracshock
