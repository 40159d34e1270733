#include "fracshock/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fracshock {

std::string_view to_string(ConvectiveScheme s)
{
    return s == ConvectiveScheme::engquist_osher ? "engquist-osher" : "lax-friedrichs";
}

ConvectiveScheme scheme_from_string(std::string_view s)
{
    if (s == "engquist-osher" || s == "engquist_osher" || s == "eo")
        return ConvectiveScheme::engquist_osher;
    if (s == "lax-friedrichs" || s == "lax_friedrichs" || s == "lf")
        return ConvectiveScheme::lax_friedrichs;
    throw std::invalid_argument("unknown convective scheme '" + std::string(s)
                                + "' (expected engquist-osher or lax-friedrichs)");
}

void validate_problem(const Problem& p)
{
    std::vector<std::string> errs;
    if (p.u0.size() != p.grid.size())
        errs.push_back("initial data has " + std::to_string(p.u0.size()) + " cells, grid has "
                       + std::to_string(p.grid.size()));
    if (!(p.lambda > 0.0 && p.lambda < 1.0))
        errs.push_back("lambda must lie in (0,1)");
    if (p.noise.space_dependent && p.lambda >= 0.5)
        errs.push_back("space-dependent noise requires lambda < 1/2");
    if (!p.flux.f || !p.flux.f_prime)
        errs.push_back("flux functions missing");
    if (!p.diffusion.A || !p.diffusion.A_prime)
        errs.push_back("diffusion functions missing");
    if (!p.noise.g || p.noise.n_modes == 0)
        errs.push_back("noise specification incomplete");
    for (double v : p.u0)
        if (!std::isfinite(v)) {
            errs.push_back("initial data not finite");
            break;
        }
    if (!errs.empty()) {
        std::string msg = "invalid problem:";
        for (const auto& e : errs)
            msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
}

Field mollify_initial(std::span<const double> u0, double epsilon, const Grid& grid)
{
    require_same_size(u0, grid, "mollify_initial");
    if (epsilon < 0.0)
        throw std::invalid_argument("mollify_initial: epsilon must be nonnegative");
    const std::size_t n = u0.size();
    Field v(u0.begin(), u0.end());
    if (epsilon == 0.0)
        return v;
    const double off = -epsilon / (grid.dx() * grid.dx());
    const double diag = 1.0 - 2.0 * off;

    // Thomas algorithm for constant tridiagonal (off, d_i, off).
    auto thomas = [&](std::vector<double> d, Field rhs) {
        std::vector<double> c(n);
        c[0] = off / d[0];
        rhs[0] /= d[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = d[i] - off * c[i - 1];
            c[i] = off / m;
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;)
            rhs[i] -= c[i] * rhs[i + 1];
        return rhs;
    };

    if (!grid.periodic())
        return thomas(std::vector<double>(n, diag), std::move(v));

    // Cyclic system via Sherman-Morrison: A = T + w z^T with corner entries `off`.
    const double gamma = -diag;
    std::vector<double> d(n, diag);
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;
    Field w(n, 0.0);
    w[0] = gamma;
    w[n - 1] = off;
    const Field y = thomas(d, std::move(v));
    const Field q = thomas(d, std::move(w));
    const double zy = y[0] + off / gamma * y[n - 1];
    const double zq = q[0] + off / gamma * q[n - 1];
    const double factor = zy / (1.0 + zq);
    Field out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] - factor * q[i];
    return out;
}

double stable_dt(const SolverConfig& config, const FluxSpec& flux, const DiffusionSpec& diff,
                 const FractionalKernel& kernel, const Grid& grid)
{
    if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0))
        throw std::invalid_argument("cfl_safety must lie in (0,1]");
    const double h = grid.dx();
    double rate = 0.0;
    if (config.epsilon > 0.0)
        rate += 2.0 * config.epsilon / (h * h);
    if (!flux.is_zero)
        rate += flux.lipschitz_bound / h;
    if (!diff.is_zero && diff.lipschitz_bound > 0.0)
        rate += diff.lipschitz_bound * kernel.max_row_sum();
    if (rate == 0.0)
        return std::numeric_limits<double>::infinity();
    return config.cfl_safety / rate;
}

double numerical_flux(double a, double b, const FluxSpec& flux, ConvectiveScheme scheme)
{
    if (scheme == ConvectiveScheme::engquist_osher) {
        if (!flux.positive_part || !flux.negative_part)
            throw std::invalid_argument("Engquist-Osher flux needs the split parts of f'");
        // d/dx f moves information along -f'; upwinding picks the right state
        // where f' > 0 and the left state where f' < 0.
        return flux.negative_part(a) + flux.positive_part(b);
    }
    return 0.5 * (flux.f(a) + flux.f(b)) + 0.5 * flux.lipschitz_bound * (b - a);
}

void convective_divergence(std::span<const double> u, const FluxSpec& flux, ConvectiveScheme scheme,
                           const Grid& grid, std::span<double> out)
{
    require_same_size(u, grid, "convective_divergence");
    const std::size_t n = u.size();
    if (flux.is_zero) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double inv_h = 1.0 / grid.dx();
    const bool per = grid.periodic();
    // face k sits between cells k-1 and k, k = 0..n
    const double left_ghost = per ? u[n - 1] : 0.0;
    double prev = numerical_flux(left_ghost, u[0], flux, scheme);
    const double first = prev;
    for (std::size_t i = 0; i < n; ++i) {
        double next;
        if (i + 1 < n)
            next = numerical_flux(u[i], u[i + 1], flux, scheme);
        else
            next = per ? first : numerical_flux(u[n - 1], 0.0, flux, scheme);
        out[i] = (next - prev) * inv_h;
        prev = next;
    }
}

Field convective_divergence(std::span<const double> u, const FluxSpec& flux, ConvectiveScheme scheme,
                            const Grid& grid)
{
    Field out(u.size());
    convective_divergence(u, flux, scheme, grid, out);
    return out;
}

Solver::Solver(Problem problem, SolverConfig config)
    : problem_(std::move(problem))
    , config_(config)
{
    validate_problem(problem_);
    kernel_ = std::make_shared<const FractionalKernel>(problem_.grid, problem_.lambda, problem_.c_lambda,
                                                       config_.r_split);
    init();
}

Solver::Solver(Problem problem, SolverConfig config, std::shared_ptr<const FractionalKernel> kernel)
    : problem_(std::move(problem))
    , config_(config)
    , kernel_(std::move(kernel))
{
    validate_problem(problem_);
    if (!kernel_ || !(kernel_->grid() == problem_.grid) || kernel_->lambda() != problem_.lambda
        || kernel_->c_lambda() != problem_.c_lambda || kernel_->r_split() != config_.r_split)
        throw std::invalid_argument("shared kernel does not match the problem");
    init();
}

void Solver::init()
{
    if (config_.epsilon < 0.0)
        throw std::invalid_argument("epsilon must be nonnegative");
    if (!(config_.t_end > 0.0))
        throw std::invalid_argument("t_end must be positive");
    if (config_.dt < 0.0)
        throw std::invalid_argument("dt must be positive (or 0 for automatic)");
    dt_bound_ = stable_dt(config_, problem_.flux, problem_.diffusion, *kernel_, problem_.grid);
    double requested = config_.dt;
    if (requested == 0.0) {
        requested = std::min(dt_bound_, config_.t_end);
    } else if (requested > dt_bound_ * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "dt = " << requested << " exceeds the stability bound " << dt_bound_;
        throw std::invalid_argument(os.str());
    }
    n_steps_ = static_cast<std::size_t>(std::ceil(config_.t_end / requested * (1.0 - 1e-12)));
    n_steps_ = std::max<std::size_t>(n_steps_, 1);
    dt_ = config_.t_end / static_cast<double>(n_steps_);
    x_ = problem_.grid.centers();
    const std::size_t n = problem_.grid.size();
    a_u_.assign(n, 0.0);
    l_a_u_.assign(n, 0.0);
    lap_.assign(n, 0.0);
    conv_.assign(n, 0.0);
    noise_.assign(n, 0.0);
}

Field Solver::initial_state() const
{
    if (config_.mollify_initial && config_.epsilon > 0.0)
        return mollify_initial(problem_.u0, config_.epsilon, problem_.grid);
    return problem_.u0;
}

WienerPath Solver::path_for(std::uint64_t seed) const
{
    return sample_path(seed, n_steps_, problem_.noise.n_modes, dt_);
}

void Solver::step(Field& u, std::span<const double> dbeta, std::size_t step_index, const StepObserver& observer)
{
    const Grid& g = problem_.grid;
    const std::size_t n = g.size();
    require_same_size(u, g, "step");
    const bool has_diff = !problem_.diffusion.is_zero;
    if (has_diff) {
        for (std::size_t i = 0; i < n; ++i)
            a_u_[i] = problem_.diffusion.A(u[i]);
        apply_full(a_u_, *kernel_, l_a_u_);
    }
    const bool has_visc = config_.epsilon > 0.0;
    if (has_visc)
        laplacian(u, g, lap_);
    convective_divergence(u, problem_.flux, config_.scheme, g, conv_);
    noise_increment(u, x_, problem_.noise, dbeta, noise_);

    if (observer) {
        StepView v;
        v.step = step_index;
        v.t = static_cast<double>(step_index) * dt_;
        v.dt = dt_;
        v.u = u;
        v.A_u = a_u_;
        v.L_A_u = l_a_u_;
        v.noise_inc = noise_;
        v.dbeta = dbeta;
        observer(v);
    }

    const double eps = config_.epsilon;
    const double range = problem_.flux.range;
    for (std::size_t i = 0; i < n; ++i) {
        double drift = conv_[i];
        if (has_visc)
            drift += eps * lap_[i];
        if (has_diff)
            drift -= l_a_u_[i];
        const double next = u[i] + dt_ * drift + noise_[i];
        if (!std::isfinite(next) || std::abs(next) > range) {
            std::ostringstream os;
            os.precision(6);
            os << (std::isfinite(next) ? "solution left the flux range [-" + std::to_string(range) + ", "
                                             + std::to_string(range) + "]"
                                       : std::string("non-finite value"))
               << " at step " << step_index << ", cell " << i << " (x = " << x_[i] << "): u = " << u[i]
               << ", convection = " << conv_[i] << ", viscosity = " << (has_visc ? eps * lap_[i] : 0.0)
               << ", nonlocal = " << (has_diff ? l_a_u_[i] : 0.0) << ", noise = " << noise_[i];
            throw SolverError(os.str());
        }
        u[i] = next;
    }
}

namespace {

std::vector<std::size_t> snapshot_steps(std::span<const double> times, double dt, std::size_t n_steps, double t_end)
{
    std::vector<std::size_t> steps;
    steps.reserve(times.size());
    for (double t : times) {
        if (t < -1e-12 || t > t_end * (1.0 + 1e-12))
            throw std::invalid_argument("snapshot time outside [0, t_end]");
        const auto s = static_cast<std::size_t>(std::llround(std::clamp(t, 0.0, t_end) / dt));
        steps.push_back(std::min(s, n_steps));
    }
    if (!std::is_sorted(steps.begin(), steps.end()))
        throw std::invalid_argument("snapshot times must be increasing");
    return steps;
}

} // namespace

Trajectory Solver::run(const WienerPath& path, std::span<const double> snapshot_times, const StepObserver& observer)
{
    if (path.n_modes != problem_.noise.n_modes)
        throw std::invalid_argument("Wiener path has " + std::to_string(path.n_modes) + " modes, noise expects "
                                    + std::to_string(problem_.noise.n_modes));
    if (path.n_steps < n_steps_ || std::abs(path.dt - dt_) > 1e-15 * dt_)
        throw std::invalid_argument("Wiener path does not match the solver time grid");
    const auto steps = snapshot_steps(snapshot_times, dt_, n_steps_, config_.t_end);

    Trajectory traj;
    traj.path_seed = path.seed;
    traj.dt = dt_;
    traj.n_steps = n_steps_;
    Field u = initial_state();
    std::size_t next = 0;
    auto record = [&](std::size_t s) {
        while (next < steps.size() && steps[next] == s) {
            traj.times.push_back(static_cast<double>(s) * dt_);
            traj.snapshots.push_back(u);
            ++next;
        }
    };
    record(0);
    for (std::size_t s = 0; s < n_steps_; ++s) {
        step(u, path.step(s), s, observer);
        record(s + 1);
    }
    if (!traj.times.empty() && steps.back() == n_steps_)
        traj.times.back() = config_.t_end;
    return traj;
}

Trajectory Solver::run(std::uint64_t seed, std::span<const double> snapshot_times, const StepObserver& observer)
{
    return run(path_for(seed), snapshot_times, observer);
}

double common_stable_dt(std::span<const Problem> problems, std::span<const SolverConfig> configs)
{
    if (problems.size() != configs.size() || problems.empty())
        throw std::invalid_argument("common_stable_dt: need matching, nonempty problem and config lists");
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const FractionalKernel k(problems[i].grid, problems[i].lambda, problems[i].c_lambda, configs[i].r_split);
        dt = std::min(dt, stable_dt(configs[i], problems[i].flux, problems[i].diffusion, k, problems[i].grid));
    }
    return dt;
}

EnsembleSummary run_ensemble(const Solver& prototype, std::span<const std::uint64_t> seeds,
                             std::span<const double> snapshot_times,
                             const std::vector<std::pair<std::string, Functional>>& functionals, std::size_t threads)
{
    const std::size_t m = seeds.size();
    const std::size_t nf = functionals.size();
    std::vector<std::vector<std::vector<double>>> per_path(m);
    std::vector<std::vector<double>> times(m);
    parallel_for(m, threads, [&](std::size_t p) {
        Solver s = prototype;
        const auto traj = s.run(seeds[p], snapshot_times);
        times[p] = traj.times;
        per_path[p].assign(nf, std::vector<double>(traj.times.size()));
        for (std::size_t f = 0; f < nf; ++f)
            for (std::size_t t = 0; t < traj.times.size(); ++t)
                per_path[p][f][t] = functionals[f].second(traj.snapshots[t], s.problem().grid);
    });
    EnsembleSummary out;
    out.n_paths = m;
    if (m == 0)
        return out;
    out.times = times.front();
    const std::size_t nt = out.times.size();
    for (const auto& f : functionals)
        out.names.push_back(f.first);
    out.mean.assign(nf, std::vector<double>(nt));
    out.se.assign(nf, std::vector<double>(nt));
    out.samples.assign(nf, std::vector<std::vector<double>>(nt, std::vector<double>(m)));
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t p = 0; p < m; ++p)
                out.samples[f][t][p] = per_path[p][f][t];
            const auto ms = mean_se(out.samples[f][t]);
            out.mean[f][t] = ms.mean;
            out.se[f][t] = ms.se;
        }
    return out;
}

std::vector<double> uniform_times(double t_end, std::size_t intervals)
{
    if (intervals == 0)
        throw std::invalid_argument("uniform_times: need at least one interval");
    std::vector<double> t(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        t[i] = t_end * static_cast<double>(i) / static_cast<double>(intervals);
    return t;
}

void write_csv(std::ostream& os, const Trajectory& traj, const Grid& grid)
{
    char buf[96];
    os << "t,x,u\n";
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", traj.times[s], grid.center(i),
                          traj.snapshots[s][i]);
            os << buf;
        }
}

namespace {

constexpr char binary_magic[8] = {'F', 'R', 'S', 'H', 'T', 'R', 'A', 'J'};
constexpr std::uint32_t binary_version = 1;

static_assert(std::endian::native == std::endian::little, "binary trajectory format assumes little endian");

template <class T>
void put(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw std::runtime_error("truncated trajectory file");
    return v;
}

} // namespace

void write_binary(std::ostream& os, const Trajectory& traj, const Grid& grid)
{
    os.write(binary_magic, sizeof binary_magic);
    put(os, binary_version);
    put(os, static_cast<std::uint64_t>(grid.size()));
    put(os, static_cast<std::uint64_t>(traj.snapshots.size()));
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        put(os, traj.times[s]);
        os.write(reinterpret_cast<const char*>(traj.snapshots[s].data()),
                 static_cast<std::streamsize>(traj.snapshots[s].size() * sizeof(double)));
    }
}

Trajectory read_binary(std::istream& is)
{
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, binary_magic, sizeof magic) != 0)
        throw std::runtime_error("not a trajectory file (bad magic)");
    if (get<std::uint32_t>(is) != binary_version)
        throw std::runtime_error("unsupported trajectory file version");
    const auto n = get<std::uint64_t>(is);
    const auto ns = get<std::uint64_t>(is);
    Trajectory t;
    for (std::uint64_t s = 0; s < ns; ++s) {
        t.times.push_back(get<double>(is));
        Field u(n);
        is.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!is)
            throw std::runtime_error("truncated trajectory file");
        t.snapshots.push_back(std::move(u));
    }
    return t;
}

} // namespace fracshock
