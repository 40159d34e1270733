import math

import numpy as np
import pytest

import fracshock as fs


def bump_problem(n=128, noise=None, lam=0.5):
    g = fs.Grid(n, -4.0, 4.0, fs.Boundary.zero_extension)
    u0 = np.array([fs.smooth_bump(x, 0.0, 1.5) for x in g.centers()])
    return fs.Problem(g, fs.burgers_flux(4.0), fs.ramp_diffusion(0.25, 1.0),
                      noise if noise is not None else fs.geometric_noise(0.25), u0, lam)


def short_config(eps=0.02):
    c = fs.SolverConfig()
    c.epsilon = eps
    c.t_end = 0.25
    return c


def test_operator_split_and_symmetry():
    g = fs.Grid(256, -8.0, 8.0, fs.Boundary.zero_extension)
    x = g.centers()
    u = np.exp(-x * x)
    v = np.sin(x) * np.exp(-0.25 * x * x)
    k = fs.FractionalKernel(g, 0.5, 1.0, 0.25)
    full = fs.apply_full(u, k)
    assert np.max(np.abs(full - fs.apply_singular(u, k) - fs.apply_regular(u, k))) <= 1e-12
    assert abs(fs.bilinear_form(u, v, k) - fs.bilinear_form(v, u, k)) <= 1e-12
    # closed form at the origin for lambda = 1/2: 2 sqrt(pi)
    mid = 0.5 * (full[127] + full[128])
    assert mid == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-2)


def test_solver_is_deterministic():
    s = fs.Solver(bump_problem(), short_config())
    times = fs.uniform_times(0.25, 4)
    a = s.run(5, times)
    b = s.run(5, times)
    assert a["times"][-1] == 0.25
    assert len(a["snapshots"]) == 5
    for x, y in zip(a["snapshots"], b["snapshots"]):
        assert np.array_equal(x, y)
    assert s.dt <= s.stability_bound


def test_unstable_dt_is_rejected():
    c = short_config()
    c.dt = 0.1
    with pytest.raises(Exception):
        fs.Solver(bump_problem(), c)


def test_contraction_report():
    p = bump_problem()
    g = p.grid
    v0 = np.array([0.5 * fs.smooth_bump(x, 0.5, 1.0) for x in g.centers()])
    rep = fs.l1_contraction(p, v0, short_config(), range(1, 5))
    assert rep["pass"]
    assert len(rep["mean"]) == len(rep["times"])
    same = fs.l1_contraction(p, p.u0, short_config(), range(1, 3))
    assert all(m == 0.0 for m in same["mean"])


def test_rate_fit_schema():
    p = bump_problem(64, fs.no_noise())
    ro = fs.RateOptions()
    ro.bootstrap_replicates = 20
    fit = fs.viscosity_rate(p, short_config(), [1 / 16, 1 / 32, 1 / 64, 1 / 128], [1], ro)
    for key in ("points", "slope", "slope_ci", "pass"):
        assert key in fit
    assert len(fit["points"]) == 4


def test_config_validation():
    cfg = fs.parse_config("grid.n_cells = 64\n")
    assert cfg["grid.n_cells"] == 64
    with pytest.raises(ValueError, match="lambda < 1/2"):
        fs.parse_config("problem.space_dependent = true\nsolver.lambda = 0.6\n")


def test_selftest_passes():
    assert fs.selftest()["pass"]
