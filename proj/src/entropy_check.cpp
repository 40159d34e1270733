#include "fracshock/entropy_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracshock/stats.hpp"

namespace fracshock {

double TestFunction::psi(double x) const { return smooth_bump(x, center, half_width); }
double TestFunction::psi_x(double x) const { return smooth_bump_derivative(x, center, half_width); }

double TestFunction::time_factor(double t) const
{
    const double s = 1.0 - t / t_end;
    return s > 0.0 ? s * s : 0.0;
}

double TestFunction::time_factor_dt(double t) const
{
    const double s = 1.0 - t / t_end;
    return s > 0.0 ? -2.0 * s / t_end : 0.0;
}

std::vector<TestFunction> test_function_library(const Grid& grid, double t_end)
{
    const double a = grid.x_min(), L = grid.length(), mid = a + 0.5 * L;
    return {
        {"bump-wide", mid, L / 4.0, t_end},
        {"bump-left", a + L / 3.0, L / 8.0, t_end},
        {"bump-right", a + 2.0 * L / 3.0, L / 8.0, t_end},
        {"bump-narrow", mid, L / 16.0, t_end},
    };
}

void check_support(const TestFunction& phi, const Grid& grid, double margin)
{
    if (phi.center - phi.half_width - margin <= grid.x_min() || phi.center + phi.half_width + margin >= grid.x_max())
        throw std::invalid_argument("test function '" + phi.id + "' support touches the window boundary");
    if (!(phi.half_width > 0.0) || !(phi.t_end > 0.0))
        throw std::invalid_argument("test function '" + phi.id + "' needs positive width and horizon");
}

std::vector<double> k_lattice(std::span<const double> u0, std::size_t count, double pad)
{
    if (count < 2 || u0.empty())
        throw std::invalid_argument("k_lattice needs data and at least two levels");
    const auto [lo, hi] = std::minmax_element(u0.begin(), u0.end());
    const double a = *lo - pad, b = *hi + pad;
    std::vector<double> ks(count);
    for (std::size_t i = 0; i < count; ++i)
        ks[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    return ks;
}

std::vector<EntropyCase> EntropyCheckSpec::cases() const
{
    std::vector<EntropyCase> out;
    for (std::size_t p = 0; p < phis.size(); ++p)
        for (double k : ks)
            for (double d : deltas)
                out.push_back({p, k, d});
    return out;
}

namespace {

std::pair<std::size_t, std::size_t> nonzero_range(const std::vector<Field>& fields)
{
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& f : fields)
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] != 0.0) {
                lo = std::min(lo, i);
                hi = std::max(hi, i + 1);
            }
    if (lo == SIZE_MAX)
        return {0, 0};
    return {lo, hi};
}

} // namespace

EntropyAccumulator::EntropyAccumulator(const Solver& solver, const EntropyCheckSpec& spec)
    : solver_(&solver)
    , spec_(&spec)
    , cases_(spec.cases())
{
    const Problem& p = solver.problem();
    const Grid& g = p.grid;
    if (spec.phis.empty() || spec.ks.empty() || spec.deltas.empty())
        throw std::invalid_argument("entropy check needs test functions, k levels and deltas");
    for (double d : spec.deltas)
        if (!(d > 0.0))
            throw std::invalid_argument("entropy check deltas must be positive");
    if (!(spec.quadrature_dt > 0.0))
        throw std::invalid_argument("quadrature_dt must be positive");
    if (spec.quadrature_dt > solver.config().t_end / 16.0)
        throw std::invalid_argument("time quadrature too coarse: quadrature_dt must not exceed t_end/16");
    for (const auto& phi : spec.phis) {
        check_support(phi, g, spec.r + 2.0 * g.dx());
        if (std::abs(phi.t_end - solver.config().t_end) > 1e-12 * phi.t_end)
            throw std::invalid_argument("test function horizon must equal the run's t_end");
    }
    if (spec.r == solver.config().r_split)
        kernel_ = solver.shared_kernel();
    else
        kernel_ = std::make_shared<const FractionalKernel>(g, p.lambda, p.c_lambda, spec.r);

    stride_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(spec.quadrature_dt / solver.dt() + 1e-9)));
    for (const auto& phi : spec.phis) {
        psi_.push_back(g.sample([&](double x) { return phi.psi(x); }));
        psi_x_.push_back(g.sample([&](double x) { return phi.psi_x(x); }));
        lr_psi_.push_back(apply_singular(psi_.back(), *kernel_));
    }
    std::tie(lo_, hi_) = nonzero_range(psi_);
    std::tie(lo_s_, hi_s_) = nonzero_range(lr_psi_);
    lo_s_ = std::min(lo_s_, lo_);
    hi_s_ = std::max(hi_s_, hi_);
    x_ = g.centers();
    lreg_.assign(g.size(), 0.0);
    terms_.assign(cases_.size(), EntropyTerms{});
}

void EntropyAccumulator::observe(const StepView& v)
{
    const Problem& p = solver_->problem();
    const Grid& g = p.grid;
    const double h = g.dx();
    const std::size_t nk = spec_->ks.size(), nd = spec_->deltas.size(), nphi = spec_->phis.size();
    auto case_index = [&](std::size_t ph, std::size_t ki, std::size_t di) { return (ph * nk + ki) * nd + di; };

    const bool coarse = v.step % stride_ == 0;
    double weight = 0.0;
    if (coarse) {
        const std::size_t remaining = solver_->n_steps() - v.step;
        weight = static_cast<double>(std::min(stride_, remaining)) * v.dt;
        if (!p.diffusion.is_zero) {
            const Field reg = apply_regular(v.A_u, *kernel_);
            std::copy(reg.begin(), reg.end(), lreg_.begin());
        } else {
            std::fill(lreg_.begin(), lreg_.end(), 0.0);
        }
    }
    const auto g2 = ito_correction(v.u, x_, p.noise);

    std::vector<double> tf(nphi), tf_dt(nphi);
    for (std::size_t ph = 0; ph < nphi; ++ph) {
        tf[ph] = spec_->phis[ph].time_factor(v.t);
        tf_dt[ph] = spec_->phis[ph].time_factor_dt(v.t);
    }

    Field fe(g.size(), 0.0), ae(g.size(), 0.0);
    for (std::size_t di = 0; di < nd; ++di) {
        const EntropyPair ep = make_eta_delta(spec_->deltas[di]);
        for (std::size_t ki = 0; ki < nk; ++ki) {
            const double k = spec_->ks[ki];
            if (coarse) {
                for (std::size_t i = lo_; i < hi_; ++i)
                    fe[i] = entropy_flux(v.u[i], k, p.flux, ep);
                for (std::size_t i = lo_s_; i < hi_s_; ++i)
                    ae[i] = a_eta_k(v.u[i], k, p.diffusion, ep);
            }
            for (std::size_t ph = 0; ph < nphi; ++ph) {
                EntropyTerms& t = terms_[case_index(ph, ki, di)];
                const auto& psi = psi_[ph];
                double init = 0.0, time = 0.0, mart = 0.0, ito = 0.0;
                for (std::size_t i = lo_; i < hi_; ++i) {
                    if (psi[i] == 0.0)
                        continue;
                    const double s = v.u[i] - k;
                    const double eta = ep.eta(s);
                    if (v.step == 0)
                        init += eta * psi[i];
                    time += eta * psi[i];
                    mart += ep.eta_prime(s) * v.noise_inc[i] * psi[i];
                    ito += 0.5 * g2[i] * ep.eta_double_prime(s) * psi[i];
                }
                if (v.step == 0)
                    t.initial += init * tf[ph] * h;
                t.time += time * tf_dt[ph] * v.dt * h;
                t.martingale += mart * tf[ph] * h;
                t.ito += ito * tf[ph] * v.dt * h;
                if (coarse) {
                    double flux = 0.0, reg = 0.0, sing = 0.0;
                    const auto& psi_x = psi_x_[ph];
                    const auto& lr = lr_psi_[ph];
                    for (std::size_t i = lo_; i < hi_; ++i) {
                        flux += fe[i] * psi_x[i];
                        reg += lreg_[i] * psi[i] * ep.eta_prime(v.u[i] - k);
                    }
                    for (std::size_t i = lo_s_; i < hi_s_; ++i)
                        sing += ae[i] * lr[i];
                    t.flux -= flux * tf[ph] * weight * h;
                    t.nonlocal_regular -= reg * tf[ph] * weight * h;
                    t.nonlocal_singular -= sing * tf[ph] * weight * h;
                }
            }
        }
    }
}

EntropyReport entropy_residual(const Solver& solver, std::span<const std::uint64_t> seeds,
                               const EntropyCheckSpec& spec, std::size_t threads)
{
    const auto cases = spec.cases();
    const std::size_t m = seeds.size();
    if (m == 0)
        throw std::invalid_argument("entropy_residual needs at least one seed");
    std::vector<std::vector<EntropyTerms>> per_path(m);
    // validate once up front so errors surface before any work is done
    const EntropyAccumulator probe(solver, spec);
    parallel_for(m, threads, [&](std::size_t pi) {
        Solver s = solver;
        EntropyAccumulator acc(s, spec);
        const std::vector<double> no_snapshots;
        s.run(seeds[pi], no_snapshots, [&](const StepView& v) { acc.observe(v); });
        per_path[pi] = acc.terms();
    });

    EntropyReport rep;
    rep.n_paths = m;
    rep.tol_dx = solver.problem().grid.dx();
    rep.tol_dt = static_cast<double>(probe.stride()) * solver.dt();
    rep.epsilon = solver.config().epsilon;
    rep.pass = true;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        EntropyResidual r;
        r.phi_id = spec.phis[cases[c].phi_index].id;
        r.k = cases[c].k;
        r.delta = cases[c].delta;
        r.r = spec.r;
        r.tol = spec.tol_constant * (rep.tol_dx + rep.tol_dt + r.delta + rep.epsilon);
        std::vector<std::vector<double>> cols(7, std::vector<double>(m));
        r.per_path.resize(m);
        std::size_t above = 0;
        for (std::size_t p = 0; p < m; ++p) {
            const auto& t = per_path[p][c];
            const double vals[7] = {t.initial, t.time, t.flux, t.martingale, t.ito, t.nonlocal_regular,
                                    t.nonlocal_singular};
            for (int q = 0; q < 7; ++q)
                cols[q][p] = vals[q];
            r.per_path[p] = t.total();
            above += r.per_path[p] >= -r.tol ? 1 : 0;
        }
        for (int q = 0; q < 7; ++q) {
            const auto ms = mean_se(cols[q]);
            r.terms[entropy_term_names[q]] = {ms.mean, ms.se};
        }
        const auto total = mean_se(r.per_path);
        r.mean = total.mean;
        r.se = total.se;
        r.fraction_above = static_cast<double>(above) / static_cast<double>(m);
        r.pass = r.mean >= -(r.tol + 3.0 * r.se) && r.fraction_above >= spec.path_quantile;
        rep.pass = rep.pass && r.pass;
        rep.cases.push_back(std::move(r));
    }
    return rep;
}

KatoResidual kato_residual(std::span<const Trajectory> us, std::span<const Trajectory> vs, const Problem& problem,
                           const FractionalKernel& kernel, const TestFunction& phi, double max_quadrature_dt)
{
    if (us.size() != vs.size() || us.empty())
        throw std::invalid_argument("kato_residual needs equally many coupled trajectories");
    const Grid& g = problem.grid;
    check_support(phi, g, g.dx());
    const Field psi = g.sample([&](double x) { return phi.psi(x); });
    const Field psi_x = g.sample([&](double x) { return phi.psi_x(x); });
    const Field l_psi = apply_full(psi, kernel);
    const double h = g.dx();

    KatoResidual out;
    std::vector<double> c_init, c_time, c_flux, c_nl;
    for (std::size_t p = 0; p < us.size(); ++p) {
        const auto& u = us[p];
        const auto& v = vs[p];
        if (u.times != v.times || u.times.size() < 2)
            throw std::invalid_argument("coupled trajectories must share at least two snapshot times");
        if (std::abs(u.times.front()) > 1e-14 || std::abs(u.times.back() - phi.t_end) > 1e-9 * phi.t_end)
            throw std::invalid_argument("snapshots must span [0, T] of the test function");
        EntropyTerms t;
        for (std::size_t i = 0; i < g.size(); ++i)
            t.initial += std::abs(u.snapshots[0][i] - v.snapshots[0][i]) * phi.phi(0.0, g.center(i)) * h;
        for (std::size_t s = 0; s + 1 < u.times.size(); ++s) {
            const double w = u.times[s + 1] - u.times[s];
            if (w > max_quadrature_dt * (1.0 + 1e-9))
                throw std::invalid_argument("snapshot grid too coarse for the time quadrature");
            const double tt = u.times[s];
            const double a = phi.time_factor(tt), at = phi.time_factor_dt(tt);
            double time = 0.0, flux = 0.0, nl = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double ui = u.snapshots[s][i], vi = v.snapshots[s][i];
                time += std::abs(ui - vi) * psi[i];
                flux += kruzkov_flux(ui, vi, problem.flux) * psi_x[i];
                nl += std::abs(problem.diffusion.A(ui) - problem.diffusion.A(vi)) * l_psi[i];
            }
            t.time += time * at * w * h;
            t.flux -= flux * a * w * h;
            t.nonlocal_regular -= nl * a * w * h;
        }
        c_init.push_back(t.initial);
        c_time.push_back(t.time);
        c_flux.push_back(t.flux);
        c_nl.push_back(t.nonlocal_regular);
        out.per_path.push_back(t.total());
    }
    const auto ms = mean_se(out.per_path);
    out.mean = ms.mean;
    out.se = ms.se;
    out.terms.initial = mean_se(c_init).mean;
    out.terms.time = mean_se(c_time).mean;
    out.terms.flux = mean_se(c_flux).mean;
    out.terms.nonlocal_regular = mean_se(c_nl).mean;
    return out;
}

} // namespace fracshock
