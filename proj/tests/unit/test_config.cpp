#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "fracshock/config.hpp"

using namespace fracshock;

namespace {

std::vector<std::string> errors_of(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.messages();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& xs, const std::string& needle)
{
    return std::any_of(xs.begin(), xs.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("empty config yields documented defaults")
{
    const RunConfig c = parse_config_text("# nothing\n\n");
    const auto echo = c.echo();
    CHECK(echo["grid.n_cells"] == 512);
    CHECK(echo["grid.boundary"] == "zero-extension");
    CHECK(echo["solver.dt"] == "auto");
    CHECK(echo["solver.lambda"] == 0.5);
    CHECK(echo["solver.c_lambda"] == 1.0);
    CHECK(echo["solver.scheme"] == "engquist-osher");
    CHECK(echo["experiment.slope_tol"] == 0.05);
    CHECK(echo["experiment.seed"].is_null());
    CHECK(echo.size() == config_keys().size());
}

TEST_CASE("values are parsed and echoed")
{
    const RunConfig c = parse_config_text("grid.n_cells = 128  # comment\n"
                                          "solver.scheme = lf\n"
                                          "solver.dt = 1e-4\n"
                                          "experiment.eps_list = 0.1, 0.05, 0.025, 0.0125\n"
                                          "experiment.seed = 99\n"
                                          "output.formats = json\n");
    CHECK(c.n_cells == 128);
    CHECK(c.solver.scheme == ConvectiveScheme::lax_friedrichs);
    CHECK_FALSE(c.dt_auto);
    CHECK(c.solver.dt == 1e-4);
    CHECK(c.eps_list.size() == 4);
    CHECK(*c.seed == 99);
    CHECK(c.write_json);
    CHECK_FALSE(c.write_csv);
    CHECK(c.seeds(99).back() == 99 + c.paths - 1);
}

TEST_CASE("every violation is reported")
{
    const auto errs = errors_of("solver.lambda = 1.2\nfoo.bar = 3\ngrid.n_cells = abc\nnot a pair\n");
    CHECK(errs.size() >= 4);
    CHECK(any_contains(errs, "unknown key 'foo.bar'"));
    CHECK(any_contains(errs, "(0, 1)"));
    CHECK(any_contains(errs, "grid.n_cells"));
    CHECK(any_contains(errs, "section.key = value"));
    CHECK(any_contains(errors_of("solver.t_end = 1\nsolver.t_end = 2\n"), "duplicate"));
}

TEST_CASE("space-dependent noise requires lambda below one half")
{
    const auto errs = errors_of("problem.space_dependent = true\nsolver.lambda = 0.6\n");
    REQUIRE(errs.size() == 1);
    CHECK(any_contains(errs, "lambda < 1/2"));
    CHECK(errors_of("problem.noise = space_dependent\nsolver.lambda = 0.5\n").size() == 1);
    CHECK(errors_of("problem.noise = space_dependent\nsolver.lambda = 0.3\n").empty());
    CHECK_FALSE(errors_of("problem.noise = single_mode\nproblem.space_dependent = true\nsolver.lambda = 0.3\n").empty());
}

TEST_CASE("explicit dt above the stability bound is rejected")
{
    CHECK(any_contains(errors_of("solver.dt = 0.1\n"), "stability bound"));
    CHECK(errors_of("solver.dt = 1e-5\n").empty());
    CHECK(errors_of("solver.dt = auto\n").empty());
}

TEST_CASE("problems assembled from config")
{
    RunConfig c = parse_config_text("grid.n_cells = 64\nproblem.flux = linear\nproblem.diffusion = zero\n"
                                    "problem.noise = none\nproblem.u0 = step\nproblem.u0_width = 1\n");
    const Problem p = c.make_problem();
    CHECK(p.grid.size() == 64);
    CHECK(p.diffusion.is_zero);
    CHECK_FALSE(p.noise.enabled);
    CHECK(*std::max_element(p.u0.begin(), p.u0.end()) == 1.0);
    CHECK_THROWS_AS(ProfileSpec{"nope"}.sample(p.grid), std::invalid_argument);
}
