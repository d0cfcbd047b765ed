"""Seeded random parameter draws for the randomized validation suites.

Two profiles are available:

``wide``
    Every positive field is log-uniform on ``[1e-2, 1e1]``. Yield and
    fraction constraints are met by construction: ``k0`` and the alphas are
    log-uniform on ``[1e-2, 1]``, ``k1 = 1 + k2 + U``, ``k3 = 1 + U``.
``moderate``
    Narrower ranges that keep the dynamics non-stiff, for integration suites.

Generator contract: ``numpy.random.default_rng(seed)``. Draws come from it in a
fixed order, so a seed gives the same sequence within a build.
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .kinetics import Haldane, Linear, Monod
from .model import HydrolysisMode, ModelParams, mass_gradient, omega_bound, removal_rates


def _lu(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def draw_wide(rng: np.random.Generator, mode: HydrolysisMode) -> ModelParams:
    lu = lambda lo=1e-2, hi=1e1: _lu(rng, lo, hi)  # noqa: E731
    k2 = lu()
    kw = dict(
        D=lu(), S1in=lu(), S2in=lu(), X0in=lu(),
        k0=lu(1e-2, 1.0), k2=k2, k1=1.0 + k2 + lu(), k3=1.0 + lu(),
        alpha0=lu(1e-2, 1.0), alpha1=lu(1e-2, 1.0), alpha2=lu(1e-2, 1.0),
        a1=lu(), a2=lu(),
        mu1=Monod(lu(), lu()) if rng.uniform() < 0.8 else Linear(lu()),
        mu2=Haldane(lu(), lu(), lu()),
    )
    mode = HydrolysisMode(mode)
    if mode is HydrolysisMode.BIOMASS:
        kw["mu0"] = Monod(lu(), lu()) if rng.uniform() < 0.5 else Linear(lu())
        kw["k_hyd"] = 0.0
    else:
        kw["k_hyd"] = lu()
    return ModelParams(hydrolysis_mode=mode, **kw)


def draw_moderate(rng: np.random.Generator, mode: HydrolysisMode) -> ModelParams:
    """Rates within about one decade of each other; used where trajectories are integrated."""
    lu = lambda lo, hi: _lu(rng, lo, hi)  # noqa: E731
    u = rng.uniform
    k2 = lu(0.2, 2.0)
    kw = dict(
        D=lu(0.05, 0.5), S1in=lu(0.5, 10.0), S2in=lu(0.5, 10.0), X0in=lu(0.5, 10.0),
        k0=u(0.3, 1.0), k2=k2, k1=1.0 + k2 + lu(0.1, 3.0), k3=1.0 + lu(0.1, 3.0),
        alpha0=u(0.3, 1.0), alpha1=u(0.3, 1.0), alpha2=u(0.3, 1.0),
        a1=lu(0.005, 0.1), a2=lu(0.005, 0.1),
        mu1=Monod(lu(0.3, 2.0), lu(0.3, 5.0)),
        mu2=Haldane(lu(0.3, 2.0), lu(0.3, 5.0), lu(1.0, 20.0)),
    )
    mode = HydrolysisMode(mode)
    if mode is HydrolysisMode.BIOMASS:
        kw["mu0"] = Monod(lu(0.3, 3.0), lu(0.3, 5.0))
        kw["k_hyd"] = 0.0
    else:
        kw["k_hyd"] = lu(0.05, 1.0)
    return ModelParams(hydrolysis_mode=mode, **kw)


PROFILES = {"wide": draw_wide, "moderate": draw_moderate}


def draws(n: int, seed: int, mode, profile: str = "wide") -> list[ModelParams]:
    """``n`` valid parameter sets; draws with ``Dmin <= 0`` are skipped, not counted."""
    rng = np.random.default_rng(seed)
    fn = PROFILES[profile]
    out = []
    while len(out) < n:
        p = fn(rng, mode)
        try:
            removal_rates(p)
        except ParameterError:
            continue
        out.append(p)
    return out


def random_state_in_omega(rng: np.random.Generator, p: ModelParams) -> list[float]:
    """Nonnegative state with ``Z`` uniform on ``[0.05, 1]*bound`` and random composition."""
    w = rng.dirichlet(np.ones(5))
    z = rng.uniform(0.05, 1.0) * omega_bound(p)
    return list(w * z / mass_gradient(p))
