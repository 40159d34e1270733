"""Python interface to the fracshock solver and estimate harness."""

import json as _json

from ._fracshock import (  # noqa: F401
    Boundary,
    ConfigError,
    ConvectiveScheme,
    FractionalKernel,
    Grid,
    Problem,
    RateOptions,
    RunOptions,
    Solver,
    SolverConfig,
    SolverError,
    apply_full,
    apply_regular,
    apply_singular,
    bilinear_form,
    burgers_flux,
    geometric_noise,
    identity_diffusion,
    l1_norm,
    linear_flux,
    no_noise,
    perturbed_diffusion,
    ramp_diffusion,
    saturating_diffusion,
    single_mode_noise,
    smooth_bump,
    space_dependent_noise,
    total_mass,
    total_variation,
    uniform_times,
    zero_diffusion,
    zero_flux,
)
from . import _fracshock as _core


def l1_contraction(problem, v0, config, seeds, tol=0.02, options=None):
    """Coupled L1 contraction report as a dict."""
    return _json.loads(_core._l1_contraction(problem, v0, config, list(seeds), tol, options or RunOptions()))


def viscosity_rate(problem, config, eps_list, seeds, rate_options=None, options=None):
    """Vanishing-viscosity rate fit as a dict."""
    return _json.loads(
        _core._viscosity_rate(problem, config, list(eps_list), list(seeds), rate_options or RateOptions(),
                              options or RunOptions()))


def continuous_dependence(problem, deltas, config, seeds, rate_options=None, options=None):
    """Continuous-dependence fit for B = A + delta tanh(u), as a dict."""
    return _json.loads(
        _core._continuous_dependence(problem, list(deltas), config, list(seeds), rate_options or RateOptions(),
                                     options or RunOptions()))


def viscous_estimates(problem, config, eps_list, seeds, options=None):
    """TV, L1 and energy report over an epsilon sweep, as a dict."""
    return _json.loads(_core._viscous_estimates(problem, config, list(eps_list), list(seeds),
                                                options or RunOptions()))


def entropy_check(solver, seeds, deltas=(0.05, 0.025), k_count=17, quadrature_dt=0.01, threads=1):
    """Entropy inequality residuals for every (test function, k, delta) case."""
    return _json.loads(_core._entropy_check(solver, list(seeds), list(deltas), k_count, quadrature_dt, threads))


def selftest(threads=2):
    """Fast invariant suite."""
    return _json.loads(_core._selftest(threads))


def parse_config(text):
    """Validated config with defaults filled in; raises ConfigError listing all problems."""
    return _json.loads(_core._parse_config(text))
