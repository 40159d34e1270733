#include "fracshock/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fracshock {

namespace {

// Runs each problem on the same path per seed. All configs get the common
// stable step so the paths coincide.
struct CoupledSet {
    std::vector<Solver> solvers;
    std::size_t n_modes = 0;
};

CoupledSet make_coupled(const std::vector<Problem>& problems, std::vector<SolverConfig> configs)
{
    const double dt = configs.front().dt > 0.0 ? configs.front().dt : common_stable_dt(problems, configs);
    for (std::size_t i = 0; i < problems.size(); ++i)
        if (problems[i].noise.n_modes != problems.front().noise.n_modes)
            throw std::invalid_argument("coupled problems must share the number of noise modes");
    CoupledSet set;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        configs[i].dt = dt;
        set.solvers.emplace_back(problems[i], configs[i]);
        if (set.solvers.back().n_steps() != set.solvers.front().n_steps())
            throw std::invalid_argument("coupled runs must share t_end");
    }
    set.n_modes = problems.front().noise.n_modes;
    return set;
}

double geometric_mean_ratio(std::span<const double> xs)
{
    return std::pow(xs.front() / xs.back(), 1.0 / static_cast<double>(xs.size() - 1));
}

} // namespace

ContractionReport l1_contraction(const Problem& problem, std::span<const double> v0, const SolverConfig& config,
                                 std::span<const std::uint64_t> seeds, double tol, const RunOptions& opt)
{
    require_same_size(v0, problem.grid, "l1_contraction: second initial datum");
    Problem pv = problem;
    pv.u0.assign(v0.begin(), v0.end());
    const auto set = make_coupled({problem, pv}, {config, config});
    const auto times = uniform_times(config.t_end, opt.snapshot_intervals);
    const std::size_t m = seeds.size();
    std::vector<std::vector<double>> dist(m);
    parallel_for(m, opt.threads, [&](std::size_t p) {
        Solver su = set.solvers[0], sv = set.solvers[1];
        const auto path = su.path_for(seeds[p]);
        const auto a = su.run(path, times);
        const auto b = sv.run(path, times);
        dist[p].resize(a.times.size());
        for (std::size_t t = 0; t < a.times.size(); ++t)
            dist[p][t] = l1_distance(a.snapshots[t], b.snapshots[t], problem.grid);
    });
    ContractionReport r;
    r.n_paths = m;
    r.tol = tol;
    r.times = times;
    r.initial_distance = l1_distance(problem.u0, v0, problem.grid);
    r.pass = m > 0;
    for (std::size_t t = 0; t < times.size(); ++t) {
        std::vector<double> col(m);
        for (std::size_t p = 0; p < m; ++p)
            col[p] = dist[p][t];
        const auto ms = mean_se(col);
        r.mean.push_back(ms.mean);
        r.se.push_back(ms.se);
        r.pass = r.pass && ms.mean <= r.initial_distance * (1.0 + tol) + 3.0 * ms.se;
    }
    return r;
}

void check_geometric(std::span<const double> xs, double min_ratio, const std::string& what)
{
    if (xs.size() < 4)
        throw std::invalid_argument(what + ": need at least 4 sweep values");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] > xs[i + 1]) || !(xs[i + 1] > 0.0))
            throw std::invalid_argument(what + ": sweep values must be positive and strictly decreasing");
    const double q = xs[0] / xs[1];
    if (q < min_ratio * (1.0 - 1e-9))
        throw std::invalid_argument(what + ": sweep ratio must be at least " + std::to_string(min_ratio));
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        if (std::abs(xs[i] / xs[i + 1] - q) > 1e-6 * q)
            throw std::invalid_argument(what + ": sweep values must form a geometric sequence");
}

void fit_rate(RateFit& fit, const std::vector<std::vector<double>>& samples, std::size_t bootstrap_replicates,
              std::uint64_t bootstrap_seed)
{
    const std::size_t n = fit.abscissae.size();
    fit.ordinates.assign(n, 0.0);
    fit.ses.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto ms = mean_se(samples[j]);
        fit.ordinates[j] = ms.mean;
        fit.ses[j] = ms.se;
        fit.n_paths = ms.n;
    }
    for (double y : fit.ordinates)
        if (!(y > 0.0)) {
            fit.notes.push_back("nonpositive mean error; log-log fit impossible");
            fit.pass = false;
            return;
        }
    const auto lf = log_log_fit(fit.abscissae, fit.ordinates);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    if (fit.n_paths >= 2)
        fit.slope_ci = bootstrap_slope_ci(fit.abscissae, samples, bootstrap_replicates, bootstrap_seed);
    else
        fit.slope_ci = {fit.slope, fit.slope};
    // errors must shrink with the abscissa up to statistical noise
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double noise = 3.0 * std::hypot(fit.ses[j], fit.ses[j + 1]);
        if (fit.ordinates[j + 1] > fit.ordinates[j] + noise) {
            fit.non_monotone = true;
            fit.notes.push_back("error increases between abscissae " + format_double(fit.abscissae[j]) + " and "
                                + format_double(fit.abscissae[j + 1]) + " beyond statistical noise (under-resolved)");
        }
    }
    fit.pass = !fit.non_monotone && fit.slope >= fit.threshold - fit.slope_tol && fit.slope_ci.lo > fit.ci_floor;
}

RateFit viscosity_rate(const Problem& problem, const SolverConfig& config, std::span<const double> eps_list,
                       std::span<const std::uint64_t> seeds, const RateOptions& ro, const RunOptions& opt)
{
    check_geometric(eps_list, 2.0, "viscosity_rate");
    if (!(ro.ref_fraction > 0.0 && ro.ref_fraction <= 0.125))
        throw std::invalid_argument("viscosity_rate: reference fraction must lie in (0, 1/8]");
    const double eps_ref = eps_list.back() * ro.ref_fraction;
    std::vector<Problem> problems(eps_list.size() + 1, problem);
    std::vector<SolverConfig> configs(eps_list.size() + 1, config);
    for (std::size_t j = 0; j < eps_list.size(); ++j)
        configs[j].epsilon = eps_list[j];
    configs.back().epsilon = eps_ref;
    for (auto& c : configs)
        c.dt = 0.0;
    const auto set = make_coupled(problems, configs);

    const std::size_t m = seeds.size(), ne = eps_list.size();
    std::vector<std::vector<double>> samples(ne, std::vector<double>(m));
    const std::vector<double> at_end{config.t_end};
    parallel_for(m, opt.threads, [&](std::size_t p) {
        auto solvers = set.solvers;
        const auto path = solvers.front().path_for(seeds[p]);
        const auto ref = solvers.back().run(path, at_end).snapshots.back();
        for (std::size_t j = 0; j < ne; ++j)
            samples[j][p] = l1_distance(solvers[j].run(path, at_end).snapshots.back(), ref, problem.grid);
    });

    RateFit fit;
    fit.abscissa_name = "epsilon";
    fit.abscissae.assign(eps_list.begin(), eps_list.end());
    fit.threshold = 0.5;
    fit.slope_tol = ro.slope_tol;
    fit.ci_floor = ro.ci_floor;
    fit.notes.push_back("reference epsilon " + format_double(eps_ref));
    fit_rate(fit, samples, ro.bootstrap_replicates, ro.bootstrap_seed);
    // The upwind scheme adds numerical viscosity of order |f'(u)| dx / 2;
    // below it the epsilon dependence is masked by the grid.
    double speed = 0.0;
    for (double v : problem.u0)
        speed = std::max(speed, std::abs(problem.flux.f_prime(v)));
    const double numerical_visc = 0.5 * speed * problem.grid.dx();
    const std::size_t n = fit.ordinates.size();
    const double last_local = n >= 2 && fit.ordinates[n - 1] > 0.0 && fit.ordinates[n - 2] > 0.0
        ? std::log(fit.ordinates[n - 2] / fit.ordinates[n - 1]) / std::log(geometric_mean_ratio(fit.abscissae))
        : 0.0;
    if (eps_list.back() < numerical_visc || (fit.slope > 0.0 && last_local < 0.5 * fit.slope)) {
        fit.grid_limited = true;
        fit.notes.push_back("grid-limited: smallest epsilon below numerical viscosity "
                            + format_double(numerical_visc) + " or error plateau at the finest point");
    }
    return fit;
}

double sup_derivative_gap(const DiffusionSpec& a, const DiffusionSpec& b, double range)
{
    double s = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double u = -range + 2.0 * range * i / 20000.0;
        s = std::max(s, std::abs(a.A_prime(u) - b.A_prime(u)));
    }
    return s;
}

std::vector<DiffusionSpec> tanh_family(const DiffusionSpec& a, std::span<const double> deltas)
{
    std::vector<DiffusionSpec> out;
    for (double d : deltas)
        out.push_back(perturbed_diffusion(a, d));
    return out;
}

RateFit continuous_dependence(const Problem& problem_a, const std::vector<DiffusionSpec>& family,
                              const SolverConfig& config, std::span<const std::uint64_t> seeds, const RateOptions& ro,
                              const RunOptions& opt)
{
    double range = 0.0;
    for (double v : problem_a.u0)
        range = std::max(range, std::abs(v));
    range += 1.0;
    std::vector<double> gaps;
    for (const auto& b : family)
        gaps.push_back(sup_derivative_gap(problem_a.diffusion, b, range));
    check_geometric(gaps, 1.0 + 1e-6, "continuous_dependence (family must be ordered by ||A'-B'||)");

    // index 0: A itself (baseline B = A), then the family
    std::vector<Problem> problems{problem_a, problem_a};
    for (const auto& b : family) {
        problems.push_back(problem_a);
        problems.back().diffusion = b;
    }
    std::vector<SolverConfig> configs(problems.size(), config);
    for (auto& c : configs)
        c.dt = 0.0;
    const auto set = make_coupled(problems, configs);

    const std::size_t m = seeds.size(), nb = family.size();
    std::vector<std::vector<double>> samples(nb, std::vector<double>(m));
    std::vector<double> baseline(m);
    const std::vector<double> at_end{config.t_end};
    parallel_for(m, opt.threads, [&](std::size_t p) {
        auto solvers = set.solvers;
        const auto path = solvers.front().path_for(seeds[p]);
        const auto ua = solvers[0].run(path, at_end).snapshots.back();
        baseline[p] = l1_distance(ua, solvers[1].run(path, at_end).snapshots.back(), problem_a.grid);
        for (std::size_t j = 0; j < nb; ++j)
            samples[j][p] =
                l1_distance(ua, solvers[j + 2].run(path, at_end).snapshots.back(), problem_a.grid) - baseline[p];
    });

    RateFit fit;
    fit.abscissa_name = "sup|A'-B'|";
    fit.abscissae = gaps;
    fit.threshold = 1.0 / (1.0 + problem_a.lambda);
    fit.slope_tol = ro.slope_tol;
    fit.notes.push_back("baseline (B = A) mean distance " + format_double(mean_se(baseline).mean));
    fit_rate(fit, samples, ro.bootstrap_replicates, ro.bootstrap_seed);
    return fit;
}

ViscousReport viscous_estimates(const Problem& problem, const SolverConfig& config, std::span<const double> eps_list,
                                std::span<const std::uint64_t> seeds, const RunOptions& opt,
                                const ViscousLimits& limits)
{
    if (eps_list.empty())
        throw std::invalid_argument("viscous_estimates: empty epsilon list");
    const Grid& g = problem.grid;
    ViscousReport rep;
    rep.tv0 = total_variation(problem.u0, g);
    rep.l10 = l1_norm(problem.u0, g);
    rep.n_paths = seeds.size();
    rep.tv_tol = limits.tv_tol;
    rep.l1_ratio_limit = limits.l1_ratio_limit;
    rep.energy_ratio_limit = limits.energy_ratio_limit;
    const auto times = uniform_times(config.t_end, opt.snapshot_intervals);
    const std::size_t m = seeds.size();
    auto kernel = std::make_shared<const FractionalKernel>(g, problem.lambda, problem.c_lambda, config.r_split);

    for (double eps : eps_list) {
        SolverConfig c = config;
        c.epsilon = eps;
        const Solver proto(problem, c, kernel);
        struct PathStats {
            std::vector<double> tv, l1, l2;
            double grad = 0.0, nonlocal = 0.0;
        };
        std::vector<PathStats> stats(m);
        parallel_for(m, opt.threads, [&](std::size_t p) {
            Solver s = proto;
            PathStats& st = stats[p];
            CompensatedSum grad, nonlocal;
            const bool has_diff = !problem.diffusion.is_zero;
            const auto traj = s.run(seeds[p], times, [&](const StepView& v) {
                grad.add(gradient_norm_sq(v.u, g) * v.dt);
                if (has_diff) {
                    // <L A(u), A(u)> dx equals h_lambda_seminorm_sq(A(u))
                    double e = 0.0;
                    for (std::size_t i = 0; i < v.u.size(); ++i)
                        e += v.L_A_u[i] * v.A_u[i];
                    nonlocal.add(e * g.dx() * v.dt);
                }
            });
            for (const auto& u : traj.snapshots) {
                st.tv.push_back(total_variation(u, g));
                st.l1.push_back(l1_norm(u, g));
                st.l2.push_back(l2_norm_sq(u, g));
            }
            st.grad = grad.value();
            st.nonlocal = nonlocal.value();
        });
        SweepEntry e;
        e.epsilon = eps;
        e.times = times;
        e.tv_pass = true;
        std::vector<double> col(m), gcol(m), ncol(m);
        for (std::size_t t = 0; t < times.size(); ++t) {
            for (std::size_t p = 0; p < m; ++p)
                col[p] = stats[p].tv[t];
            auto ms = mean_se(col);
            e.tv_mean.push_back(ms.mean);
            e.tv_se.push_back(ms.se);
            e.tv_pass = e.tv_pass && ms.mean <= rep.tv0 * (1.0 + rep.tv_tol) + 3.0 * ms.se;
            for (std::size_t p = 0; p < m; ++p)
                col[p] = stats[p].l1[t];
            ms = mean_se(col);
            e.l1_mean.push_back(ms.mean);
            e.l1_se.push_back(ms.se);
            for (std::size_t p = 0; p < m; ++p)
                col[p] = stats[p].l2[t];
            e.sup_l2 = std::max(e.sup_l2, mean_se(col).mean);
        }
        for (std::size_t p = 0; p < m; ++p) {
            gcol[p] = stats[p].grad;
            ncol[p] = stats[p].nonlocal;
        }
        e.viscous_dissipation = eps * mean_se(gcol).mean;
        e.nonlocal_energy = mean_se(ncol).mean;
        e.l1_constant = rep.l10 > 0.0 ? *std::max_element(e.l1_mean.begin(), e.l1_mean.end()) / rep.l10 : 0.0;
        rep.entries.push_back(std::move(e));
    }

    auto ratio = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        if (*hi == 0.0)
            return 1.0;  // all zero: trivially uniform
        return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    };
    std::vector<double> cs, es;
    rep.tv_pass = true;
    for (const auto& e : rep.entries) {
        cs.push_back(e.l1_constant);
        es.push_back(e.energy_total());
        rep.tv_pass = rep.tv_pass && e.tv_pass;
    }
    rep.l1_ratio = ratio(cs);
    rep.energy_ratio = ratio(es);
    rep.l1_pass = rep.l1_ratio <= rep.l1_ratio_limit;
    rep.energy_pass = rep.energy_ratio <= rep.energy_ratio_limit;
    return rep;
}

// ---------------------------------------------------------------- serialisation

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json to_json(const ContractionReport& r)
{
    nlohmann::json j;
    j["kind"] = "l1_contraction";
    j["n_paths"] = r.n_paths;
    j["initial_distance"] = r.initial_distance;
    j["tol"] = r.tol;
    j["times"] = r.times;
    j["mean"] = r.mean;
    j["se"] = r.se;
    j["pass"] = r.pass;
    return j;
}

nlohmann::json to_json(const RateFit& r)
{
    nlohmann::json j;
    j["kind"] = "rate_fit";
    j["abscissa"] = r.abscissa_name;
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < r.abscissae.size(); ++i)
        pts.push_back({{"x", r.abscissae[i]},
                       {"mean", i < r.ordinates.size() ? r.ordinates[i] : 0.0},
                       {"se", i < r.ses.size() ? r.ses[i] : 0.0}});
    j["points"] = pts;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["r_squared"] = r.r_squared;
    j["slope_ci"] = {r.slope_ci.lo, r.slope_ci.hi};
    j["threshold"] = r.threshold;
    j["slope_tol"] = r.slope_tol;
    if (std::isfinite(r.ci_floor))
        j["ci_floor"] = r.ci_floor;
    j["grid_limited"] = r.grid_limited;
    j["non_monotone"] = r.non_monotone;
    j["notes"] = r.notes;
    j["n_paths"] = r.n_paths;
    j["pass"] = r.pass;
    return j;
}

nlohmann::json to_json(const ViscousReport& r)
{
    nlohmann::json j;
    j["kind"] = "viscous_estimates";
    j["n_paths"] = r.n_paths;
    j["tv0"] = r.tv0;
    j["l1_0"] = r.l10;
    j["tv_tol"] = r.tv_tol;
    nlohmann::json es = nlohmann::json::array();
    for (const auto& e : r.entries)
        es.push_back({{"epsilon", e.epsilon},
                      {"times", e.times},
                      {"tv_mean", e.tv_mean},
                      {"tv_se", e.tv_se},
                      {"l1_mean", e.l1_mean},
                      {"l1_se", e.l1_se},
                      {"l1_constant", e.l1_constant},
                      {"sup_l2_sq", e.sup_l2},
                      {"viscous_dissipation", e.viscous_dissipation},
                      {"nonlocal_energy", e.nonlocal_energy},
                      {"energy_total", e.energy_total()},
                      {"tv_pass", e.tv_pass}});
    j["entries"] = es;
    j["l1_ratio"] = r.l1_ratio;
    j["l1_ratio_limit"] = r.l1_ratio_limit;
    j["energy_ratio"] = r.energy_ratio;
    j["energy_ratio_limit"] = r.energy_ratio_limit;
    j["tv_pass"] = r.tv_pass;
    j["l1_pass"] = r.l1_pass;
    j["energy_pass"] = r.energy_pass;
    j["pass"] = r.pass();
    return j;
}

nlohmann::json to_json(const EntropyResidual& r)
{
    nlohmann::json terms;
    for (const auto& [name, v] : r.terms)
        terms[name] = {{"mean", v.first}, {"se", v.second}};
    return {{"phi_id", r.phi_id}, {"k", r.k},   {"delta", r.delta},
            {"r", r.r},           {"mean", r.mean}, {"se", r.se},
            {"tol", r.tol},       {"fraction_above", r.fraction_above},
            {"terms", terms},     {"pass", r.pass}};
}

nlohmann::json to_json(const EntropyReport& r)
{
    nlohmann::json j;
    j["kind"] = "entropy_check";
    j["n_paths"] = r.n_paths;
    j["tol_terms"] = {{"dx", r.tol_dx}, {"dt", r.tol_dt}, {"epsilon", r.epsilon}};
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : r.cases)
        cs.push_back(to_json(c));
    j["cases"] = cs;
    j["pass"] = r.pass;
    return j;
}

void write_csv(std::ostream& os, const ContractionReport& r)
{
    os << "t,mean,se\n";
    for (std::size_t i = 0; i < r.times.size(); ++i)
        os << format_double(r.times[i]) << ',' << format_double(r.mean[i]) << ',' << format_double(r.se[i]) << '\n';
}

void write_csv(std::ostream& os, const RateFit& r)
{
    os << "x,mean,se\n";
    for (std::size_t i = 0; i < r.abscissae.size() && i < r.ordinates.size(); ++i)
        os << format_double(r.abscissae[i]) << ',' << format_double(r.ordinates[i]) << ','
           << format_double(r.ses[i]) << '\n';
}

void write_csv(std::ostream& os, const ViscousReport& r)
{
    os << "epsilon,t,tv_mean,tv_se,l1_mean,l1_se\n";
    for (const auto& e : r.entries)
        for (std::size_t i = 0; i < e.times.size(); ++i)
            os << format_double(e.epsilon) << ',' << format_double(e.times[i]) << ',' << format_double(e.tv_mean[i])
               << ',' << format_double(e.tv_se[i]) << ',' << format_double(e.l1_mean[i]) << ','
               << format_double(e.l1_se[i]) << '\n';
}

void write_csv(std::ostream& os, const EntropyReport& r)
{
    os << "phi_id,k,delta,mean,se,tol,fraction_above,pass\n";
    for (const auto& c : r.cases)
        os << c.phi_id << ',' << format_double(c.k) << ',' << format_double(c.delta) << ',' << format_double(c.mean)
           << ',' << format_double(c.se) << ',' << format_double(c.tol) << ',' << format_double(c.fraction_above)
           << ',' << (c.pass ? 1 : 0) << '\n';
}

} // namespace fracshock
