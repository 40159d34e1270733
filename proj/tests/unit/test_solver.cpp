#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracshock/solver.hpp"

using namespace fracshock;

namespace {

Problem periodic_problem(std::size_t n, FluxSpec f, DiffusionSpec a, NoiseSpec noise)
{
    Grid g(n, 0.0, 2.0 * M_PI, Boundary::periodic);
    Problem p{g, std::move(f), std::move(a), std::move(noise), g.sample([](double x) { return std::sin(x) + 0.3; }),
              0.5, 1.0};
    return p;
}

double max_abs_diff(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("mollify_initial")
{
    Grid z(64, -2.0, 2.0, Boundary::zero_extension);
    const Field step = z.sample([](double x) { return std::abs(x) < 0.7 ? 1.0 : 0.0; });
    CHECK(mollify_initial(step, 0.0, z) == step);
    const auto v = mollify_initial(step, 0.01, z);
    CHECK(l1_norm(v, z) <= l1_norm(step, z) + 1e-12);
    CHECK(total_variation(v, z) <= total_variation(step, z) + 1e-12);
    CHECK_THROWS(mollify_initial(step, -1.0, z));

    // residual of the linear system
    Field lap(64);
    laplacian(v, z, lap);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(v[i] - 0.01 * lap[i] == doctest::Approx(step[i]).epsilon(1e-12).scale(1.0));

    Grid p(50, 0.0, 2.0 * M_PI, Boundary::periodic);
    const double w = 3.0, eps = 0.05;
    const Field s = p.sample([&](double x) { return std::sin(w * x); });
    const auto vs = mollify_initial(s, eps, p);
    const double h = p.dx();
    const double mu = 4.0 * std::sin(0.5 * w * h) * std::sin(0.5 * w * h) / (h * h);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(vs[i] == doctest::Approx(s[i] / (1.0 + eps * mu)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("stable_dt")
{
    Grid g(128, 0.0, 1.0, Boundary::zero_extension);  // dx = 1/128
    const auto k = build_kernel(g, 0.5, 1.0, 0.1);
    SolverConfig cfg;
    cfg.cfl_safety = 0.8;
    const auto f = linear_flux(2.0);
    CHECK(stable_dt(cfg, f, zero_diffusion(), k, g) == doctest::Approx(0.8 * g.dx() / 2.0));
    // direct row sums of the kernel
    double w_row = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = k.tail_singular()[i] + k.tail_regular()[i];
        for (std::size_t j = 0; j < g.size(); ++j)
            if (j != i) {
                const std::size_t d = i > j ? i - j : j - i;
                s += k.weights_singular()[d] + k.weights_regular()[d];
            }
        w_row = std::max(w_row, s);
    }
    CHECK(k.max_row_sum() == doctest::Approx(w_row).epsilon(1e-12));
    const auto a = identity_diffusion(1.5);
    CHECK(stable_dt(cfg, zero_flux(), a, k, g) == doctest::Approx(0.8 / (1.5 * w_row)));
    cfg.epsilon = 0.01;
    const double expect = 0.8 / (2 * 0.01 / (g.dx() * g.dx()) + 2.0 / g.dx() + 1.5 * w_row);
    CHECK(stable_dt(cfg, f, a, k, g) == doctest::Approx(expect));
    cfg.epsilon = 0.0;
    CHECK(std::isinf(stable_dt(cfg, zero_flux(), zero_diffusion(), k, g)));
}

TEST_CASE("convective divergence")
{
    Grid p(32, 0.0, 1.0, Boundary::periodic);
    const auto b = burgers_flux(5.0);
    for (auto scheme : {ConvectiveScheme::engquist_osher, ConvectiveScheme::lax_friedrichs}) {
        for (double v : convective_divergence(Field(32, 0.7), b, scheme, p))
            CHECK(std::abs(v) < 1e-12);
        const Field u = p.sample([](double x) { return std::sin(2 * M_PI * x) + 0.2 * std::cos(6 * M_PI * x); });
        double total = 0.0;
        for (double v : convective_divergence(u, b, scheme, p))
            total += v * p.dx();
        CHECK(std::abs(total) < 1e-12);
    }
    // f(u) = u on 6 cells: upwinding for u_t = u_x takes the right neighbour
    Grid g(6, 0.0, 6.0, Boundary::zero_extension);
    const Field step{0, 0, 1, 1, 1, 0};
    const auto d = convective_divergence(step, linear_flux(1.0), ConvectiveScheme::engquist_osher, g);
    const Field expect{0, 1, 0, 0, -1, 0};
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(d[i] == doctest::Approx(expect[i]));
    CHECK(numerical_flux(2.0, -1.0, b, ConvectiveScheme::engquist_osher) == doctest::Approx(0.0));
    CHECK(numerical_flux(-1.0, 2.0, b, ConvectiveScheme::engquist_osher) == doctest::Approx(0.5 + 2.0));
}

TEST_CASE("step with every term off leaves the state unchanged")
{
    auto p = periodic_problem(32, zero_flux(), zero_diffusion(), no_noise());
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.r_split = 0.5;
    Solver s(p, cfg);
    Field u = p.u0;
    s.step(u, std::vector<double>{0.3});
    CHECK(u == p.u0);
}

TEST_CASE("pure nonlocal diffusion does not increase the L2 norm")
{
    auto p = periodic_problem(64, zero_flux(), identity_diffusion(), no_noise());
    SolverConfig cfg;
    cfg.r_split = 0.3;
    cfg.t_end = 0.2;
    Solver s(p, cfg);
    Field u = s.initial_state();
    double prev = l2_norm_sq(u, p.grid);
    const std::vector<double> zero{0.0};
    for (std::size_t n = 0; n < s.n_steps(); ++n) {
        s.step(u, zero, n);
        const double now = l2_norm_sq(u, p.grid);
        CHECK(now <= prev * (1.0 + 1e-14));
        prev = now;
    }
}

TEST_CASE("linear transport moves the profile left at unit speed")
{
    std::vector<double> errs;
    for (std::size_t n : {64, 128, 256}) {
        auto p = periodic_problem(n, linear_flux(1.0), zero_diffusion(), no_noise());
        SolverConfig cfg;
        cfg.t_end = 0.5;
        cfg.r_split = 0.5;
        Solver s(p, cfg);
        const std::vector<double> times{0.5};
        const auto traj = s.run(1, times);
        const Field exact = p.grid.sample([](double x) { return std::sin(x + 0.5) + 0.3; });
        errs.push_back(l1_distance(traj.snapshots.back(), exact, p.grid));
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 0.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 0.8);
    CHECK(errs[2] < 0.05);
}

TEST_CASE("runs are deterministic and reject unstable steps")
{
    auto p = periodic_problem(64, burgers_flux(4.0), ramp_diffusion(0.25, 1.0), geometric_noise(0.25));
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.t_end = 0.1;
    cfg.r_split = 0.3;
    Solver s(p, cfg);
    const auto times = uniform_times(0.1, 4);
    const auto a = s.run(99, times);
    const auto b = s.run(99, times);
    CHECK(a.snapshots == b.snapshots);
    CHECK(a.times.size() == 5);
    CHECK(a.times.back() == 0.1);
    CHECK(max_abs_diff(a.snapshots.back(), s.run(100, times).snapshots.back()) > 0.0);

    SolverConfig bad = cfg;
    bad.dt = 10.0 * s.stability_bound();
    CHECK_THROWS_AS(Solver(p, bad), std::invalid_argument);

    auto sd = p;
    sd.noise = space_dependent_noise(0.25);
    CHECK_THROWS_AS(Solver(sd, cfg), std::invalid_argument);
}

TEST_CASE("blow-up is reported with its location")
{
    auto p = periodic_problem(32, burgers_flux(1.0), zero_diffusion(), single_mode_noise(1.0));
    SolverConfig cfg;
    cfg.r_split = 0.5;
    Solver s(p, cfg);
    Field u = p.u0;
    try {
        s.step(u, std::vector<double>{50.0}, 7);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("step 7") != std::string::npos);
        CHECK(msg.find("cell") != std::string::npos);
    }
}

TEST_CASE("mean mass is conserved under zero-mean noise")
{
    auto p = periodic_problem(64, burgers_flux(4.0), identity_diffusion(0.5), geometric_noise(0.25));
    SolverConfig cfg;
    cfg.t_end = 0.25;
    cfg.r_split = 0.3;
    Solver s(p, cfg);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 64; ++i)
        seeds.push_back(1000 + i);
    const auto times = uniform_times(0.25, 1);
    const auto sum = run_ensemble(s, seeds, times, {{"mass", [](auto u, const Grid& g) { return total_mass(u, g); }}}, 2);
    const double m0 = total_mass(p.u0, p.grid);
    CHECK(sum.mean[0][0] == doctest::Approx(m0));
    CHECK(std::abs(sum.mean[0][1] - m0) <= 4.0 * sum.se[0][1]);
    const auto serial =
        run_ensemble(s, seeds, times, {{"mass", [](auto u, const Grid& g) { return total_mass(u, g); }}}, 1);
    CHECK(serial.mean == sum.mean);
}

TEST_CASE("trajectory export")
{
    auto p = periodic_problem(8, zero_flux(), identity_diffusion(), no_noise());
    SolverConfig cfg;
    cfg.t_end = 0.01;
    cfg.r_split = 0.8;
    Solver s(p, cfg);
    const auto times = uniform_times(0.01, 2);
    const auto traj = s.run(1, times);
    std::stringstream bin;
    write_binary(bin, traj, p.grid);
    const auto back = read_binary(bin);
    CHECK(back.times == traj.times);
    CHECK(back.snapshots == traj.snapshots);
    std::stringstream bad("NOTATRAJ");
    CHECK_THROWS(read_binary(bad));
    std::ostringstream csv;
    write_csv(csv, traj, p.grid);
    const auto text = csv.str();
    CHECK(text.rfind("t,x,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 8);
}
