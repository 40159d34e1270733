#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fracshock/stats.hpp"
#include "fracshock/stochastic.hpp"

using namespace fracshock;

TEST_CASE("Wiener paths are reproducible and correctly distributed")
{
    const auto a = sample_path(42, 1000, 16, 0.01);
    const auto b = sample_path(42, 1000, 16, 0.01);
    CHECK(a.increments == b.increments);
    CHECK(sample_path(43, 1000, 16, 0.01).increments != a.increments);
    CHECK_THROWS(sample_path(1, 10, 0, 0.01));
    CHECK_THROWS(sample_path(1, 10, 2, 0.0));

    const double dt = 0.004;
    const auto p = sample_path(7, 100000, 1, dt);
    const auto m = mean_se(p.increments);
    CHECK(std::abs(m.mean) <= 4.0 * std::sqrt(dt / 1e5));
    CHECK(std::abs(m.std * m.std - dt) <= 0.05 * dt);
    CHECK(p.step(3)[0] == p.increments[3]);
}

TEST_CASE("noise increment")
{
    Grid g(16, -1.0, 1.0, Boundary::zero_extension);
    const auto x = g.centers();
    const auto noise = geometric_noise(0.25);
    const auto path = sample_path(3, 4, 16, 0.01);
    for (double v : noise_increment(Field(16, 0.0), x, noise, path.step(0)))
        CHECK(v == 0.0);
    CHECK_THROWS(noise_increment(Field(16, 1.0), x, noise, sample_path(3, 4, 8, 0.01).step(0)));

    const auto single = single_mode_noise(0.3);
    const std::vector<double> h{0.05};
    const Field u = g.sample([](double s) { return 1.0 + s; });
    const auto inc = noise_increment(u, x, single, h);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(inc[i] == doctest::Approx(0.3 * u[i] * 0.05));

    // default family at u = 1 against direct summation of the definition
    const auto ones = noise_increment(Field(16, 1.0), x, noise, path.step(1));
    double direct = 0.0;
    for (std::size_t k = 1; k <= 16; ++k)
        direct += std::sqrt(0.25) * std::pow(2.0, -0.5 * k) * path.step(1)[k - 1];
    for (double v : ones)
        CHECK(v == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("separable fast path agrees with the generic coefficient")
{
    Grid g(32, -3.0, 3.0, Boundary::zero_extension);
    const auto x = g.centers();
    const Field u = g.sample([](double s) { return std::sin(3 * s) + 0.5; });
    for (const auto& spec : {geometric_noise(0.5, 6), space_dependent_noise(0.3, 6, 0.0, 1.5)}) {
        auto generic = spec;
        generic.separable.reset();
        const auto path = sample_path(1, 1, 6, 0.02);
        const auto fast = noise_increment(u, x, spec, path.step(0));
        const auto slow = noise_increment(u, x, generic, path.step(0));
        const auto g2f = ito_correction(u, x, spec);
        const auto g2s = ito_correction(u, x, generic);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-13));
            CHECK(g2f[i] == doctest::Approx(g2s[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("Ito correction")
{
    Grid g(8, 0.0, 1.0, Boundary::periodic);
    const auto x = g.centers();
    const Field u{0.0, 1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 1.0};
    const auto single = ito_correction(u, x, single_mode_noise(0.4));
    const auto geo = ito_correction(u, x, geometric_noise(0.25));
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(single[i] == doctest::Approx(0.16 * u[i] * u[i]));
        CHECK(geo[i] <= 0.25 * u[i] * u[i] + 1e-15);
    }
    CHECK(ito_correction(Field(8, 0.0), x, geometric_noise(1.0)) == Field(8, 0.0));
}

TEST_CASE("noise families satisfy the growth and Lipschitz assumptions")
{
    CHECK(validate_noise(geometric_noise(0.25), -4, 4, 3).empty());
    CHECK(validate_noise(single_mode_noise(0.5), -4, 4, 3).empty());
    const auto sd = space_dependent_noise(0.25, 16, 0.0, 2.0, 3.0);
    CHECK(sd.space_dependent);
    CHECK(validate_noise(sd, -4, 4, 3).empty());

    NoiseSpec bad = geometric_noise(0.25, 2);
    bad.separable.reset();
    bad.g = [](std::size_t, double, double u) { return 0.1 + u; };
    CHECK_FALSE(validate_noise(bad, -1, 1, 1).empty());
}

TEST_CASE("smooth bump")
{
    CHECK(smooth_bump(0.0, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(smooth_bump(1.0, 0.0, 1.0) == 0.0);
    const double h = 1e-6;
    for (double x : {-0.7, -0.2, 0.3, 0.8})
        CHECK(smooth_bump_derivative(x, 0.0, 1.0)
              == doctest::Approx((smooth_bump(x + h, 0.0, 1.0) - smooth_bump(x - h, 0.0, 1.0)) / (2 * h)).epsilon(1e-5));
}
