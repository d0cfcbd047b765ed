"""Model parameters, the right-hand side of the five-state digester and mass balance.

State ordering is ``(X0, S1, X1, S2, X2)`` everywhere in the package. Hydrolysis
is either first order, ``r0 = k_hyd*X0``, or biomass dependent,
``r0 = mu0(X0)*X1``.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kinetics
from .errors import DomainError, ParameterError
from .kinetics import H1, H2, H3, GrowthCurve


class HydrolysisMode(str, enum.Enum):
    FIRST_ORDER = "first_order"
    BIOMASS = "biomass"


class State(NamedTuple):
    X0: float
    S1: float
    X1: float
    S2: float
    X2: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


class RemovalRates(NamedTuple):
    D1: float
    D2: float
    Dmin: float


_SCALARS = ("k0", "k1", "k2", "k3", "k_hyd", "alpha0", "alpha1", "alpha2",
            "a1", "a2", "D", "X0in", "S1in", "S2in")


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set; all constraints are checked on construction."""

    mu1: GrowthCurve
    mu2: GrowthCurve
    D: float
    S1in: float
    S2in: float
    X0in: float = 0.0
    k0: float = 1.0
    k1: float = 2.0
    k2: float = 1.0
    k3: float = 1.0
    alpha0: float = 1.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    a1: float = 0.0
    a2: float = 0.0
    hydrolysis_mode: HydrolysisMode = HydrolysisMode.FIRST_ORDER
    k_hyd: float = 0.0
    mu0: Optional[GrowthCurve] = None

    def __post_init__(self):
        object.__setattr__(self, "hydrolysis_mode", HydrolysisMode(self.hydrolysis_mode))
        for name in _SCALARS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParameterError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.D <= 0:
            raise ParameterError("D must be positive")
        for name in ("X0in", "S1in", "S2in", "a1", "a2", "k_hyd", "k2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")
        for name in ("k0", "k1", "k3"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.k0 > 1:
            raise ParameterError("yield constraint k0 <= 1 violated")
        if self.k1 < 1 + self.k2:
            raise ParameterError("yield constraint k1 >= 1 + k2 violated")
        if self.k3 < 1:
            raise ParameterError("yield constraint k3 >= 1 violated")
        if not 0 < self.alpha0 <= 1:
            raise ParameterError("alpha0 must lie in (0, 1]")
        for name in ("alpha1", "alpha2"):
            if not 0 <= getattr(self, name) <= 1:
                raise ParameterError(f"{name} must lie in [0, 1]")
        try:
            kinetics.require_class(self.mu1, H1, "mu1")
            kinetics.require_class(self.mu2, H2, "mu2")
        except kinetics.CurveClassError as exc:
            raise ParameterError(str(exc)) from exc
        if self.hydrolysis_mode is HydrolysisMode.BIOMASS:
            if self.k_hyd != 0:
                raise ParameterError("k_hyd must be zero in biomass-dependent mode")
            try:
                kinetics.require_class(self.mu0, H3, "mu0")
            except kinetics.CurveClassError as exc:
                raise ParameterError(str(exc)) from exc
        elif self.mu0 is not None:
            raise ParameterError("mu0 is only used in biomass-dependent mode")

    @property
    def biomass(self) -> bool:
        return self.hydrolysis_mode is HydrolysisMode.BIOMASS

    @property
    def D1(self) -> float:
        return self.alpha1 * self.D + self.a1

    @property
    def D2(self) -> float:
        return self.alpha2 * self.D + self.a2

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {"hydrolysis_mode": self.hydrolysis_mode.value}
        for name in _SCALARS:
            out[name] = getattr(self, name)
        for name in ("mu0", "mu1", "mu2"):
            c = getattr(self, name)
            if c is not None:
                out[name] = c.to_dict()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        d = dict(d)
        for name in ("mu0", "mu1", "mu2"):
            if d.get(name) is not None:
                d[name] = kinetics.curve_from_dict(d[name])
        return cls(**d)


def removal_rates(p: ModelParams) -> RemovalRates:
    """Effective removal rates ``D_i = alpha_i*D + a_i`` and their minimum with ``alpha0*D``."""
    d1, d2 = p.D1, p.D2
    dmin = min(p.alpha0 * p.D, d1, d2)
    if dmin <= 0:
        raise ParameterError(f"Dmin = {dmin} must be positive (D1={d1}, D2={d2})")
    return RemovalRates(d1, d2, dmin)


def _check_state(x) -> State:
    x = State(*(float(v) for v in x))
    if any(v < 0 for v in x):
        raise DomainError(f"state components must be nonnegative, got {x}")
    return x


def hydrolysis_rate(p: ModelParams, x0: float, x1: float) -> float:
    if p.biomass:
        return p.mu0._f(x0) * x1 if x0 != 0 else 0.0
    return p.k_hyd * x0


def rhs(p: ModelParams, x) -> np.ndarray:
    """Time derivative of the state; raises :class:`DomainError` on negative input."""
    x = _check_state(x)
    return np.array(make_rhs(p)(x))


def make_rhs(p: ModelParams):
    """Unchecked right-hand side ``f(y) -> list`` working on plain floats.

    Used by the integrator, whose trial stages may dip marginally below zero.
    """
    D, D1, D2 = p.D, p.D1, p.D2
    k0, k1, k2, k3 = p.k0, p.k1, p.k2, p.k3
    a0D = p.alpha0 * D
    dx0, ds1, ds2 = D * p.X0in, D * p.S1in, D * p.S2in
    f1, f2 = p.mu1._f, p.mu2._f
    if p.biomass:
        f0 = p.mu0._f

        def f(y):
            x0, s1, x1, s2, x2 = y
            r0 = f0(x0) * x1
            g1 = f1(s1) * x1
            g2 = f2(s2) * x2
            return [dx0 - a0D * x0 - r0,
                    ds1 - D * s1 + k0 * r0 - k1 * g1,
                    g1 - D1 * x1,
                    ds2 - D * s2 + k2 * g1 - k3 * g2,
                    g2 - D2 * x2]
    else:
        kh = p.k_hyd

        def f(y):
            x0, s1, x1, s2, x2 = y
            r0 = kh * x0
            g1 = f1(s1) * x1
            g2 = f2(s2) * x2
            return [dx0 - a0D * x0 - r0,
                    ds1 - D * s1 + k0 * r0 - k1 * g1,
                    g1 - D1 * x1,
                    ds2 - D * s2 + k2 * g1 - k3 * g2,
                    g2 - D2 * x2]
    return f


def total_mass(p: ModelParams, x) -> float:
    """``Z = k0*X0 + S1 + S2 + (k1-k2)*X1 + k3*X2``."""
    x0, s1, x1, s2, x2 = x
    return p.k0 * x0 + s1 + s2 + (p.k1 - p.k2) * x1 + p.k3 * x2


def mass_gradient(p: ModelParams) -> np.ndarray:
    return np.array([p.k0, 1.0, p.k1 - p.k2, 1.0, p.k3])


def input_mass(p: ModelParams) -> float:
    """``Zin = k0*X0in + S1in + S2in``."""
    return p.k0 * p.X0in + p.S1in + p.S2in


def mass_balance_rate(p: ModelParams, x) -> float:
    """Closed form of dZ/dt; the hydrolysis terms cancel in both modes."""
    x0, s1, x1, s2, x2 = x
    return (p.D * input_mass(p) - p.alpha0 * p.D * p.k0 * x0 - p.D * s1
            - p.D1 * (p.k1 - p.k2) * x1 - p.D * s2 - p.D2 * p.k3 * x2)


def omega_bound(p: ModelParams) -> float:
    """Upper bound ``(D/Dmin)*Zin`` of the attracting invariant set."""
    return p.D / removal_rates(p).Dmin * input_mass(p)


def gronwall_envelope(p: ModelParams, z0: float, t):
    """Bound on ``Z(t)`` given ``Z(0) = z0``; ``t`` may be an array."""
    rr = removal_rates(p)
    b = p.D / rr.Dmin * input_mass(p)
    return b + (z0 - b) * np.exp(-rr.Dmin * np.asarray(t, dtype=float))
