"""Equilibria of both hydrolysis variants.

First-order hydrolysis has closed-form equilibria. With biomass-dependent
hydrolysis, equilibria with ``X1 > 0`` sit at the roots of ``xi(X0) = delta(X0)``
on ``(0, X0in/alpha0)``. There ``xi`` is the X1 level that balances the X0
equation and ``delta`` the one that balances S1. ``xi`` is decreasing and convex,
``delta`` is affine, so at most two roots exist, and :func:`multiplicity` counts
them without scanning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import kinetics
from ._roots import bisect
from .errors import DomainError, NumericError, ParameterError
from .model import ModelParams, State, removal_rates

#: Left end of root brackets, relative to ``X0in/alpha0``.
EPS_REL = 1e-12
ROOT_RESIDUAL_TOL = 1e-10
TANGENCY_RTOL = 1e-12


@dataclass(frozen=True, order=True)
class EquilibriumLabel:
    """``E_j^i`` (first order) or ``E_j^{ik}`` (biomass dependent, j = 1)."""

    j: int
    i: int
    k: Optional[int] = None

    def __str__(self):
        base = f"E{self.j}{self.i}"
        return base if self.k is None else f"{base}k{self.k}"

    @property
    def sort_key(self):
        return (self.j, self.k or 0, self.i)

    @classmethod
    def parse(cls, text: str) -> "EquilibriumLabel":
        if not (text.startswith("E") and len(text) >= 3):
            raise ValueError(f"bad equilibrium label {text!r}")
        j, i = int(text[1]), int(text[2])
        k = int(text[4:]) if len(text) > 3 and text[3] == "k" else None
        return cls(j, i, k)


@dataclass(frozen=True)
class EquilibriumRecord:
    label: EquilibriumLabel
    state: Optional[State]
    exists: bool
    existence_margins: tuple = ()
    x1_aux: Optional[float] = None
    s2_aux: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "label": str(self.label),
            "exists": self.exists,
            "state": None if self.state is None else dict(self.state._asdict()),
            "existence_margins": [[n, s] for n, s in self.existence_margins],
            "x1_aux": self.x1_aux,
            "s2_aux": self.s2_aux,
        }


def _record(label, state, margins, **aux):
    exists = state is not None and all(s > 0 for _, s in margins)
    return EquilibriumRecord(label, state, exists, tuple(margins), **aux)


# -- first-order hydrolysis -----------------------------------------------------

def _require_mode(p, biomass):
    if p.biomass != biomass:
        want = "biomass-dependent" if biomass else "first-order"
        raise ParameterError(f"operation requires {want} hydrolysis")


def x0_star_firstorder(p: ModelParams) -> float:
    """Steady hydrolysable substrate ``D*X0in/(k_hyd + alpha0*D)``."""
    _require_mode(p, False)
    return p.D * p.X0in / (p.k_hyd + p.alpha0 * p.D)


def s1in_star(p: ModelParams) -> float:
    """Effective S1 feed once hydrolysis products are added."""
    _require_mode(p, False)
    return p.S1in + p.k0 * p.k_hyd * p.X0in / (p.k_hyd + p.alpha0 * p.D)


def _lambda2_margin(p, d2, pair, i):
    """Slack for ``S2in``-type conditions ``S > lambda2_i``; undefined pair gives peak - D2."""
    if pair is None:
        return None, p.mu2.peak - d2
    return pair[i - 1], None


def equilibria_firstorder(p: ModelParams) -> list[EquilibriumRecord]:
    """All six candidate equilibria ``E00, E01, E02, E10, E11, E12`` with existence data."""
    _require_mode(p, False)
    rr = removal_rates(p)
    D, k1, k2, k3 = p.D, p.k1, p.k2, p.k3
    be = kinetics.break_even(p.mu1, p.mu2, rr.D1, rr.D2)
    x0s, s1s = x0_star_firstorder(p), s1in_star(p)
    lam1, pair = be.lambda1, be.lambda2
    out = [_record(EquilibriumLabel(0, 0), State(x0s, s1s, 0.0, p.S2in, 0.0), [])]

    for i in (1, 2):
        lab = EquilibriumLabel(0, i)
        if pair is None:
            out.append(_record(lab, None, [("D2 <= mu2(S2m)", p.mu2.peak - rr.D2)]))
            continue
        l2 = pair[i - 1]
        st = State(x0s, s1s, 0.0, l2, D / (k3 * rr.D2) * (p.S2in - l2))
        out.append(_record(lab, st, [(f"S2in > lambda2_{i}", p.S2in - l2)]))

    if lam1 is None:
        m1 = [("D1 < sup mu1", p.mu1.sup - rr.D1)]
        out.append(_record(EquilibriumLabel(1, 0), None, m1))
        for i in (1, 2):
            out.append(_record(EquilibriumLabel(1, i), None, m1))
        return out

    x1 = D / (k1 * rr.D1) * (s1s - lam1)
    m1 = ("S1in* > lambda1", s1s - lam1)
    s2 = p.S2in + k2 / k1 * (s1s - lam1)
    out.append(_record(EquilibriumLabel(1, 0), State(x0s, lam1, x1, s2, 0.0), [m1],
                       x1_aux=x1, s2_aux=s2))
    hs = kinetics.h_functions(lam1, pair, k1, k2)
    feed = p.S2in + k2 / k1 * s1s
    for i in (1, 2):
        lab = EquilibriumLabel(1, i)
        if hs is None:
            out.append(_record(lab, None, [m1, ("D2 <= mu2(S2m)", p.mu2.peak - rr.D2)]))
            continue
        h = hs[i - 1]
        st = State(x0s, lam1, x1, pair[i - 1], D / (k3 * rr.D2) * (feed - h))
        out.append(_record(lab, st, [m1, (f"S2in + k2/k1*S1in* > H{i}", feed - h)],
                           x1_aux=x1, s2_aux=s2))
    return out


# -- biomass-dependent hydrolysis ---------------------------------------------

def x0_upper(p: ModelParams) -> float:
    """Right end ``X0in/alpha0`` of the admissible X0 interval."""
    return p.X0in / p.alpha0


def xi(p: ModelParams, x0: float) -> float:
    """X1 that balances the X0 equation: ``D*(X0in - alpha0*X0)/mu0(X0)``."""
    _require_mode(p, True)
    if x0 <= 0:
        raise DomainError("xi is singular at X0 <= 0")
    return p.D * (p.X0in - p.alpha0 * x0) / p.mu0._f(x0)


def xi_prime(p: ModelParams, x0: float) -> float:
    _require_mode(p, True)
    if x0 <= 0:
        raise DomainError("xi' is singular at X0 <= 0")
    mu = p.mu0._f(x0)
    return -p.alpha0 * p.D / mu - xi(p, x0) / mu * p.mu0._df(x0)


def xi_second(p: ModelParams, x0: float) -> float:
    _require_mode(p, True)
    mu = p.mu0._f(x0)
    return (-xi(p, x0) / mu * p.mu0._d2f(x0)
            - 2.0 * p.mu0._df(x0) / mu * xi_prime(p, x0))


def delta_slope(p: ModelParams) -> float:
    """``-alpha0*D*k0/(k1*D1)``, the (constant) slope of :func:`delta`."""
    return -p.alpha0 * p.D * p.k0 / (p.k1 * p.D1)


def delta(p: ModelParams, x0: float, lam1: Optional[float] = None) -> Optional[float]:
    """X1 that balances the S1 equation at ``S1 = lambda1``; affine in X0."""
    _require_mode(p, True)
    if lam1 is None:
        lam1 = kinetics.lambda1(p.mu1, removal_rates(p).D1)
        if lam1 is None:
            return None
    return p.D / (p.k1 * p.D1) * ((p.S1in - lam1) + p.k0 * (p.X0in - p.alpha0 * x0))


@dataclass(frozen=True)
class MultiplicityReport:
    N: int
    roots: tuple
    xbar: Optional[float]
    s1in_bar: Optional[float]
    branch_case: int
    lambda1: Optional[float]
    slope_condition: bool
    degenerate: bool = False
    residuals: tuple = field(default=())

    def to_dict(self) -> dict:
        return {"N": self.N, "roots": list(self.roots), "xbar": self.xbar,
                "s1in_bar": self.s1in_bar, "branch_case": self.branch_case,
                "lambda1": self.lambda1, "slope_condition": self.slope_condition,
                "degenerate": self.degenerate, "residuals": list(self.residuals)}


def _left_bracket(g, upper):
    """Point near 0 where ``g > 0``; ``g`` tends to +inf at 0."""
    lo = EPS_REL * upper
    while g(lo) <= 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise NumericError("could not bracket root near X0 = 0", lo=lo)
    return lo


def _solve_xbar(p, upper, target):
    """Unique X0 with ``xi'(X0) = target`` (``xi'`` is increasing)."""
    g = lambda x: target - xi_prime(p, x)  # noqa: E731  positive near 0
    lo = _left_bracket(g, upper)
    return bisect(g, lo, upper).x


def multiplicity(p: ModelParams) -> MultiplicityReport:
    """Count and locate the roots of ``xi = delta`` on ``(0, X0in/alpha0)``.

    ``branch_case`` is 1-5 following the five-way case split on the sign of
    ``S1in - lambda1`` and on whether ``k0*mu0(X0in/alpha0) > k1*D1``; 0 means
    ``lambda1`` is undefined so no population-1 equilibrium can exist.
    """
    _require_mode(p, True)
    rr = removal_rates(p)
    lam1 = kinetics.lambda1(p.mu1, rr.D1)
    upper = x0_upper(p)
    cond = p.k0 * p.mu0._f(upper) > p.k1 * rr.D1 if upper > 0 else False
    if lam1 is None or upper <= 0:
        return MultiplicityReport(0, (), None, None, 0, lam1, cond)

    phi = lambda x: xi(p, x) - delta(p, x, lam1)  # noqa: E731
    target = delta_slope(p)
    xbar = s1bar = None
    degenerate = False
    if not cond:
        if p.S1in > lam1:
            case, brackets = 1, [(None, upper)]
        else:
            case, brackets = 2, []
    else:
        xbar = _solve_xbar(p, upper, target)
        s1bar = (lam1 + p.k1 * rr.D1 / p.D * xi(p, xbar)
                 - p.k0 * (p.X0in - p.alpha0 * xbar))
        thr = max(0.0, s1bar)
        if p.S1in >= lam1:
            case, brackets = 3, [(None, xbar)]
        elif abs(p.S1in - s1bar) <= TANGENCY_RTOL * max(1.0, abs(s1bar)):
            case, brackets, degenerate = 5, [], True
        elif p.S1in > thr:
            case, brackets = 4, [(None, xbar), (xbar, upper)]
        else:
            case, brackets = 5, []

    roots, residuals = [], []
    if degenerate:
        roots, residuals = [xbar], [abs(phi(xbar))]
    for lo, hi in brackets:
        if lo is None:
            lo = _left_bracket(phi, upper)
        r = bisect(phi, lo, hi)
        if not 0 < r.x < upper:
            raise NumericError("root left the open interval", root=r.x, upper=upper)
        roots.append(r.x)
        residuals.append(r.residual)
    worst = max(residuals, default=0.0)
    if worst > ROOT_RESIDUAL_TOL * max(1.0, max((xi(p, x) for x in roots), default=1.0)):
        raise NumericError("xi = delta residual above tolerance",
                           residuals=residuals, roots=roots, case=case)
    return MultiplicityReport(len(roots), tuple(roots), xbar, s1bar, case, lam1, cond,
                              degenerate, tuple(residuals))


def equilibria_biomass(p: ModelParams, report: Optional[MultiplicityReport] = None
                       ) -> list[EquilibriumRecord]:
    """``E00``, ``E01``, ``E02`` plus ``E1{0,1,2}k`` for every root ``k``."""
    _require_mode(p, True)
    rr = removal_rates(p)
    D, k2, k3 = p.D, p.k2, p.k3
    pair = kinetics.lambda2_pair(p.mu2, rr.D2)
    x0s = x0_upper(p)
    out = [_record(EquilibriumLabel(0, 0), State(x0s, p.S1in, 0.0, p.S2in, 0.0), [])]
    for i in (1, 2):
        lab = EquilibriumLabel(0, i)
        if pair is None:
            out.append(_record(lab, None, [("D2 <= mu2(S2m)", p.mu2.peak - rr.D2)]))
            continue
        l2 = pair[i - 1]
        st = State(x0s, p.S1in, 0.0, l2, D / (k3 * rr.D2) * (p.S2in - l2))
        out.append(_record(lab, st, [(f"S2in > lambda2_{i}", p.S2in - l2)]))

    rep = report if report is not None else multiplicity(p)
    for k, x0k in enumerate(rep.roots, start=1):
        x1 = xi(p, x0k)
        s2k = p.S2in + k2 * rr.D1 / D * x1
        root_margin = ("xi(X0) = delta(X0) root", x1)
        out.append(_record(EquilibriumLabel(1, 0, k), State(x0k, rep.lambda1, x1, s2k, 0.0),
                           [root_margin], x1_aux=x1, s2_aux=s2k))
        for i in (1, 2):
            lab = EquilibriumLabel(1, i, k)
            if pair is None:
                out.append(_record(lab, None, [root_margin,
                                               ("D2 <= mu2(S2m)", p.mu2.peak - rr.D2)],
                                   x1_aux=x1, s2_aux=s2k))
                continue
            l2 = pair[i - 1]
            x2 = (D * (p.S2in - l2) + k2 * rr.D1 * x1) / (k3 * rr.D2)
            out.append(_record(lab, State(x0k, rep.lambda1, x1, l2, x2),
                               [root_margin, (f"S2k* > lambda2_{i}", s2k - l2)],
                               x1_aux=x1, s2_aux=s2k))
    return out


def equilibria(p: ModelParams) -> list[EquilibriumRecord]:
    """Dispatch on the hydrolysis mode."""
    return equilibria_biomass(p) if p.biomass else equilibria_firstorder(p)


def existing(records) -> list[EquilibriumRecord]:
    return [r for r in records if r.exists]
