"""Growth-rate laws, break-even concentrations and the H auxiliary functions.

Three kinetic laws are supported:

* :class:`Monod` ``m*s/(K+s)``: increasing, concave, saturating (classes H1, H3)
* :class:`Linear` ``c*s``: increasing, concave, unbounded (classes H1, H3)
* :class:`Haldane` ``m*s/(K+s+s**2/KI)``: single interior peak at
  ``sqrt(K*KI)`` (class H2)

Each curve has a checked public evaluator (``rate``/``deriv``) that rejects
negative concentrations and an unchecked ``_f``/``_df`` pair that the
integrator uses at intermediate Runge-Kutta stages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from ._roots import bisect
from .errors import CurveClassError, DomainError

H1, H2, H3 = "H1", "H2", "H3"

#: Relative tolerance used to decide that ``d2`` sits exactly on the Haldane peak.
PEAK_RTOL = 1e-10


def _check_positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be a finite positive number, got {v!r}")


def _check_conc(s):
    if s < 0:
        raise DomainError(f"concentration must be nonnegative, got {s!r}")


class _Curve:
    hypothesis_classes: frozenset = frozenset()
    kind = ""

    def rate(self, s: float) -> float:
        """Specific growth rate at concentration ``s >= 0``."""
        _check_conc(s)
        if s == 0:
            return 0.0
        return self._f(s)

    def deriv(self, s: float) -> float:
        """Analytic first derivative at ``s >= 0``."""
        _check_conc(s)
        return self._df(s)

    def deriv2(self, s: float) -> float:
        _check_conc(s)
        return self._d2f(s)

    def is_class(self, cls: str) -> bool:
        return cls in self.hypothesis_classes

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Monod(_Curve):
    m: float
    K: float

    hypothesis_classes = frozenset({H1, H3})
    kind = "monod"

    def __post_init__(self):
        _check_positive(m=self.m, K=self.K)

    @property
    def sup(self) -> float:
        return self.m

    def _f(self, s):
        return self.m * s / (self.K + s)

    def _df(self, s):
        return self.m * self.K / (self.K + s) ** 2

    def _d2f(self, s):
        return -2.0 * self.m * self.K / (self.K + s) ** 3

    def inverse(self, d: float) -> Optional[float]:
        if d >= self.m:
            return None
        return self.K * d / (self.m - d)

    def to_dict(self):
        return {"kind": self.kind, "m": self.m, "K": self.K}


@dataclass(frozen=True)
class Linear(_Curve):
    c: float

    hypothesis_classes = frozenset({H1, H3})
    kind = "linear"

    def __post_init__(self):
        _check_positive(c=self.c)

    @property
    def sup(self) -> float:
        return math.inf

    def _f(self, s):
        return self.c * s

    def _df(self, s):
        return self.c

    def _d2f(self, s):
        return 0.0

    def inverse(self, d: float) -> Optional[float]:
        return d / self.c

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Haldane(_Curve):
    m: float
    K: float
    KI: float

    hypothesis_classes = frozenset({H2})
    kind = "haldane"

    def __post_init__(self):
        _check_positive(m=self.m, K=self.K, KI=self.KI)

    @property
    def s_peak(self) -> float:
        """Maximizer ``sqrt(K*KI)``."""
        return math.sqrt(self.K * self.KI)

    @property
    def peak(self) -> float:
        return self._f(self.s_peak)

    @property
    def sup(self) -> float:
        return self.peak

    def _f(self, s):
        return self.m * s / (self.K + s + s * s / self.KI)

    def _df(self, s):
        den = self.K + s + s * s / self.KI
        return self.m * (self.K - s * s / self.KI) / (den * den)

    def _d2f(self, s):
        den = self.K + s + s * s / self.KI
        num = self.K - s * s / self.KI
        dden = 1.0 + 2.0 * s / self.KI
        return self.m * ((-2.0 * s / self.KI) * den - 2.0 * num * dden) / den ** 3

    def to_dict(self):
        return {"kind": self.kind, "m": self.m, "K": self.K, "KI": self.KI}


GrowthCurve = Union[Monod, Linear, Haldane]

_KINDS = {"monod": Monod, "linear": Linear, "haldane": Haldane}


def curve_from_dict(d: dict) -> GrowthCurve:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise DomainError(f"unknown growth curve kind {kind!r}")
    return _KINDS[kind](**d)


def require_class(curve, cls: str, role: str = "curve") -> None:
    if not isinstance(curve, _Curve) or not curve.is_class(cls):
        raise CurveClassError(f"{role} must satisfy {cls}, got {curve!r}")


# -- break-even concentrations ------------------------------------------------

def lambda1(curve: GrowthCurve, d1: float) -> Optional[float]:
    """Break-even concentration solving ``mu1(S) = d1`` for an H1 curve.

    Returns ``None`` when ``d1`` is not below the supremum of the curve.
    """
    require_class(curve, H1, "mu1")
    if d1 <= 0:
        raise DomainError(f"d1 must be positive, got {d1!r}")
    return curve.inverse(d1)


def lambda1_bisect(curve: GrowthCurve, d1: float) -> Optional[float]:
    """Same as :func:`lambda1` but by bracketed bisection, for any H1 curve."""
    require_class(curve, H1, "mu1")
    if d1 <= 0:
        raise DomainError(f"d1 must be positive, got {d1!r}")
    if d1 >= curve.sup:
        return None
    hi = 1.0
    while curve._f(hi) <= d1:
        hi *= 2.0
        if not math.isfinite(hi):
            return None
    return bisect(lambda s: curve._f(s) - d1, 0.0, hi).x


def lambda2_pair(curve: GrowthCurve, d2: float) -> Optional[tuple[float, float]]:
    """Both solutions ``lo <= hi`` of ``mu2(S) = d2`` for an H2 curve.

    The Haldane equation reduces to ``S**2 + KI*(d2 - m)/d2 * S + K*KI = 0``;
    the smaller root is taken from the product ``K*KI`` to avoid
    cancellation. ``None`` when ``d2`` exceeds the peak rate.
    """
    require_class(curve, H2, "mu2")
    if d2 <= 0:
        raise DomainError(f"d2 must be positive, got {d2!r}")
    peak = curve.peak
    if abs(d2 - peak) <= PEAK_RTOL * peak:
        return (curve.s_peak, curve.s_peak)
    if d2 > peak:
        return None
    b = curve.KI * (curve.m - d2) / d2
    disc = b * b - 4.0 * curve.K * curve.KI
    hi = 0.5 * (b + math.sqrt(max(disc, 0.0)))
    lo = curve.K * curve.KI / hi
    return (lo, hi)


def lambda2_pair_bisect(curve: GrowthCurve, d2: float) -> Optional[tuple[float, float]]:
    require_class(curve, H2, "mu2")
    if d2 <= 0:
        raise DomainError(f"d2 must be positive, got {d2!r}")
    sm = curve.s_peak
    peak = curve._f(sm)
    if abs(d2 - peak) <= PEAK_RTOL * peak:
        return (sm, sm)
    if d2 > peak:
        return None
    g = lambda s: curve._f(s) - d2  # noqa: E731
    lo = bisect(g, 0.0, sm).x
    hi = 2.0 * sm
    while g(hi) >= 0:
        hi *= 2.0
    return (lo, bisect(g, sm, hi).x)


@dataclass(frozen=True)
class BreakEven:
    """Break-even concentrations for given removal rates; ``None`` means undefined."""

    lambda1: Optional[float]
    lambda2_low: Optional[float]
    lambda2_high: Optional[float]

    @property
    def lambda2(self) -> Optional[tuple[float, float]]:
        if self.lambda2_low is None:
            return None
        return (self.lambda2_low, self.lambda2_high)


def break_even(mu1: GrowthCurve, mu2: GrowthCurve, d1: float, d2: float) -> BreakEven:
    pair = lambda2_pair(mu2, d2)
    lo, hi = pair if pair is not None else (None, None)
    return BreakEven(lambda1(mu1, d1), lo, hi)


def h_functions(lam1: Optional[float], pair: Optional[tuple[float, float]],
                k1: float, k2: float) -> Optional[tuple[float, float]]:
    """``H_i = lambda2_i + (k2/k1)*lambda1`` for i = 1, 2; ``None`` if undefined."""
    if lam1 is None or pair is None:
        return None
    shift = k2 / k1 * lam1
    return (pair[0] + shift, pair[1] + shift)
