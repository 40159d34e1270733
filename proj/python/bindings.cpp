#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracshock/config.hpp"
#include "fracshock/entropy_check.hpp"
#include "fracshock/estimates.hpp"
#include "fracshock/selftest.hpp"
#include "fracshock/solver.hpp"

namespace py = pybind11;
using namespace fracshock;

namespace {

py::array_t<double> to_array(const Field& f) { return py::array_t<double>(f.size(), f.data()); }

Field to_field(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 1)
        throw std::invalid_argument("expected a one-dimensional array");
    return Field(a.data(), a.data() + a.size());
}

// Reports cross the boundary as JSON text and are decoded in Python.
template <class R>
std::string dump(const R& r)
{
    return to_json(r).dump();
}

} // namespace

PYBIND11_MODULE(_fracshock, m)
{
    m.doc() = "Stochastic fractional degenerate conservation law solver";

    py::enum_<Boundary>(m, "Boundary")
        .value("periodic", Boundary::periodic)
        .value("zero_extension", Boundary::zero_extension);
    py::enum_<ConvectiveScheme>(m, "ConvectiveScheme")
        .value("engquist_osher", ConvectiveScheme::engquist_osher)
        .value("lax_friedrichs", ConvectiveScheme::lax_friedrichs);

    py::class_<Grid>(m, "Grid")
        .def(py::init<std::size_t, double, double, Boundary>(), py::arg("n_cells"), py::arg("x_min"),
             py::arg("x_max"), py::arg("boundary") = Boundary::zero_extension)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("dx", &Grid::dx)
        .def_property_readonly("x_min", &Grid::x_min)
        .def_property_readonly("x_max", &Grid::x_max)
        .def_property_readonly("boundary", &Grid::boundary)
        .def("centers", [](const Grid& g) { return to_array(g.centers()); });

    m.def("l1_norm", [](py::array_t<double> u, const Grid& g) { return l1_norm(to_field(u), g); });
    m.def("total_variation", [](py::array_t<double> u, const Grid& g) { return total_variation(to_field(u), g); });
    m.def("total_mass", [](py::array_t<double> u, const Grid& g) { return total_mass(to_field(u), g); });

    py::class_<FractionalKernel>(m, "FractionalKernel")
        .def(py::init<const Grid&, double, double, double>(), py::arg("grid"), py::arg("lambda_"),
             py::arg("c_lambda") = 1.0, py::arg("r_split") = 0.25)
        .def("max_row_sum", &FractionalKernel::max_row_sum);
    m.def("apply_full", [](py::array_t<double> u, const FractionalKernel& k) { return to_array(apply_full(to_field(u), k)); });
    m.def("apply_singular",
          [](py::array_t<double> u, const FractionalKernel& k) { return to_array(apply_singular(to_field(u), k)); });
    m.def("apply_regular",
          [](py::array_t<double> u, const FractionalKernel& k) { return to_array(apply_regular(to_field(u), k)); });
    m.def("bilinear_form", [](py::array_t<double> u, py::array_t<double> v, const FractionalKernel& k) {
        return bilinear_form(to_field(u), to_field(v), k);
    });

    py::class_<FluxSpec>(m, "FluxSpec").def_readonly("name", &FluxSpec::name);
    py::class_<DiffusionSpec>(m, "DiffusionSpec").def_readonly("name", &DiffusionSpec::name);
    py::class_<NoiseSpec>(m, "NoiseSpec").def_readonly("name", &NoiseSpec::name);
    m.def("zero_flux", &zero_flux);
    m.def("linear_flux", &linear_flux, py::arg("c"));
    m.def("burgers_flux", &burgers_flux, py::arg("clip"));
    m.def("zero_diffusion", &zero_diffusion);
    m.def("identity_diffusion", &identity_diffusion, py::arg("scale") = 1.0);
    m.def("ramp_diffusion", &ramp_diffusion, py::arg("threshold"), py::arg("slope"));
    m.def("saturating_diffusion", &saturating_diffusion, py::arg("level"));
    m.def("perturbed_diffusion", &perturbed_diffusion, py::arg("base"), py::arg("amplitude"));
    m.def("no_noise", &no_noise);
    m.def("geometric_noise", &geometric_noise, py::arg("K"), py::arg("n_modes") = 16);
    m.def("single_mode_noise", &single_mode_noise, py::arg("sigma"));
    m.def("space_dependent_noise", &space_dependent_noise, py::arg("D"), py::arg("n_modes") = 16,
          py::arg("center") = 0.0, py::arg("width") = 2.0, py::arg("working_range") = 4.0);
    m.def("smooth_bump", &smooth_bump, py::arg("x"), py::arg("center"), py::arg("width"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &SolverConfig::epsilon)
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("t_end", &SolverConfig::t_end)
        .def_readwrite("cfl_safety", &SolverConfig::cfl_safety)
        .def_readwrite("scheme", &SolverConfig::scheme)
        .def_readwrite("r_split", &SolverConfig::r_split)
        .def_readwrite("mollify_initial", &SolverConfig::mollify_initial);

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const Grid& g, FluxSpec f, DiffusionSpec a, NoiseSpec n, py::array_t<double> u0,
                         double lambda, double c_lambda) {
                 return Problem{g, std::move(f), std::move(a), std::move(n), to_field(u0), lambda, c_lambda};
             }),
             py::arg("grid"), py::arg("flux"), py::arg("diffusion"), py::arg("noise"), py::arg("u0"),
             py::arg("lambda_") = 0.5, py::arg("c_lambda") = 1.0)
        .def_readonly("grid", &Problem::grid)
        .def_property_readonly("u0", [](const Problem& p) { return to_array(p.u0); })
        .def_readonly("lambda_", &Problem::lambda);

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Solver>(m, "Solver")
        .def(py::init<Problem, SolverConfig>(), py::arg("problem"), py::arg("config"))
        .def_property_readonly("dt", &Solver::dt)
        .def_property_readonly("n_steps", &Solver::n_steps)
        .def_property_readonly("stability_bound", &Solver::stability_bound)
        .def("initial_state", [](const Solver& s) { return to_array(s.initial_state()); })
        .def(
            "run",
            [](Solver& s, std::uint64_t seed, std::vector<double> times) {
                Trajectory t;
                {
                    py::gil_scoped_release release;
                    t = s.run(seed, times);
                }
                py::list snaps;
                for (const auto& f : t.snapshots)
                    snaps.append(to_array(f));
                return py::dict(py::arg("times") = t.times, py::arg("snapshots") = snaps, py::arg("dt") = t.dt,
                                py::arg("n_steps") = t.n_steps, py::arg("seed") = t.path_seed);
            },
            py::arg("seed"), py::arg("times"));

    m.def("uniform_times", &uniform_times, py::arg("t_end"), py::arg("intervals"));

    py::class_<RunOptions>(m, "RunOptions")
        .def(py::init<>())
        .def_readwrite("threads", &RunOptions::threads)
        .def_readwrite("snapshot_intervals", &RunOptions::snapshot_intervals);
    py::class_<RateOptions>(m, "RateOptions")
        .def(py::init<>())
        .def_readwrite("slope_tol", &RateOptions::slope_tol)
        .def_readwrite("ci_floor", &RateOptions::ci_floor)
        .def_readwrite("ref_fraction", &RateOptions::ref_fraction)
        .def_readwrite("bootstrap_replicates", &RateOptions::bootstrap_replicates)
        .def_readwrite("bootstrap_seed", &RateOptions::bootstrap_seed);

    m.def(
        "_l1_contraction",
        [](const Problem& p, py::array_t<double> v0, const SolverConfig& c, std::vector<std::uint64_t> seeds,
           double tol, const RunOptions& opt) {
            const Field v = to_field(v0);
            py::gil_scoped_release release;
            return dump(l1_contraction(p, v, c, seeds, tol, opt));
        },
        py::arg("problem"), py::arg("v0"), py::arg("config"), py::arg("seeds"), py::arg("tol") = 0.02,
        py::arg("options") = RunOptions{});
    m.def(
        "_viscosity_rate",
        [](const Problem& p, const SolverConfig& c, std::vector<double> eps, std::vector<std::uint64_t> seeds,
           const RateOptions& ro, const RunOptions& opt) {
            py::gil_scoped_release release;
            return dump(viscosity_rate(p, c, eps, seeds, ro, opt));
        },
        py::arg("problem"), py::arg("config"), py::arg("eps_list"), py::arg("seeds"),
        py::arg("rate_options") = RateOptions{}, py::arg("options") = RunOptions{});
    m.def(
        "_continuous_dependence",
        [](const Problem& p, std::vector<double> deltas, const SolverConfig& c, std::vector<std::uint64_t> seeds,
           const RateOptions& ro, const RunOptions& opt) {
            py::gil_scoped_release release;
            return dump(continuous_dependence(p, tanh_family(p.diffusion, deltas), c, seeds, ro, opt));
        },
        py::arg("problem"), py::arg("deltas"), py::arg("config"), py::arg("seeds"),
        py::arg("rate_options") = RateOptions{}, py::arg("options") = RunOptions{});
    m.def(
        "_viscous_estimates",
        [](const Problem& p, const SolverConfig& c, std::vector<double> eps, std::vector<std::uint64_t> seeds,
           const RunOptions& opt) {
            py::gil_scoped_release release;
            return dump(viscous_estimates(p, c, eps, seeds, opt));
        },
        py::arg("problem"), py::arg("config"), py::arg("eps_list"), py::arg("seeds"),
        py::arg("options") = RunOptions{});
    m.def(
        "_entropy_check",
        [](const Solver& s, std::vector<std::uint64_t> seeds, std::vector<double> deltas, std::size_t k_count,
           double quadrature_dt, std::size_t threads) {
            EntropyCheckSpec spec;
            spec.phis = test_function_library(s.problem().grid, s.config().t_end);
            spec.ks = k_lattice(s.initial_state(), k_count);
            spec.deltas = std::move(deltas);
            spec.quadrature_dt = quadrature_dt;
            py::gil_scoped_release release;
            return dump(entropy_residual(s, seeds, spec, threads));
        },
        py::arg("solver"), py::arg("seeds"), py::arg("deltas") = std::vector<double>{0.05, 0.025},
        py::arg("k_count") = 17, py::arg("quadrature_dt") = 0.01, py::arg("threads") = 1);
    m.def("_selftest", [](std::size_t threads) { return dump(run_selftest(threads)); }, py::arg("threads") = 2);
    m.def(
        "_parse_config",
        [](const std::string& text) { return parse_config_text(text).echo().dump(); }, py::arg("text"));
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
