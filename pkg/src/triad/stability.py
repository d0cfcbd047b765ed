"""Local stability: analytic verdicts, Routh-Hurwitz coefficients, eigenvalues.

The Jacobian at any state is block lower triangular with a 3x3 block ``J_F``
for ``(X0, S1, X1)`` and a 2x2 block ``C`` for ``(S2, X2)``, so the spectrum is
obtained from a cubic and a quadratic.

Analytic verdicts are built from named conditions, each with a signed slack
that is positive when the condition holds. Verdict rules:

* ``UNSTABLE`` if any slack is below ``-SLACK_TOL``
* ``STABLE`` if every slack is above ``SLACK_TOL``
* ``MARGINAL`` otherwise
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kinetics
from .equilibria import (EquilibriumRecord, MultiplicityReport, delta_slope,
                         multiplicity, s1in_star, xi, xi_prime)
from .errors import ParameterError, StructureError
from .model import ModelParams, State, removal_rates

SLACK_TOL = 1e-12
MARGIN_RTOL = 1e-9
#: Threshold used when deciding whether analytic and numeric verdicts must agree.
AGREEMENT_MARGIN = 1e-6


class Verdict(str, enum.Enum):
    STABLE = "S"
    UNSTABLE = "U"
    MARGINAL = "M"


def jacobian(p: ModelParams, x) -> np.ndarray:
    """Analytic 5x5 Jacobian of the right-hand side at state ``x``."""
    x0, s1, x1, s2, x2 = (float(v) for v in x)
    D, rr = p.D, removal_rates(p)
    k0, k1, k2, k3 = p.k0, p.k1, p.k2, p.k3
    if p.biomass:
        dr_dx0, dr_dx1 = p.mu0._df(x0) * x1, p.mu0._f(x0)
    else:
        dr_dx0, dr_dx1 = p.k_hyd, 0.0
    m1, dm1 = p.mu1._f(s1), p.mu1._df(s1)
    m2, dm2 = p.mu2._f(s2), p.mu2._df(s2)
    J = np.zeros((5, 5))
    J[0, 0] = -p.alpha0 * D - dr_dx0
    J[0, 2] = -dr_dx1
    J[1, 0] = k0 * dr_dx0
    J[1, 1] = -D - k1 * dm1 * x1
    J[1, 2] = k0 * dr_dx1 - k1 * m1
    J[2, 1] = dm1 * x1
    J[2, 2] = m1 - rr.D1
    J[3, 1] = k2 * dm1 * x1
    J[3, 2] = k2 * m1
    J[3, 3] = -D - k3 * dm2 * x2
    J[3, 4] = -k3 * m2
    J[4, 3] = dm2 * x2
    J[4, 4] = m2 - rr.D2
    return J


def reduced_jacobian_firstorder(p: ModelParams, x) -> np.ndarray:
    """Jacobian of the four-state system in ``(S1, X1, S2, X2)`` with X0 at its steady value.

    Written out independently of :func:`jacobian` so the two can be compared.
    """
    _, s1, x1, s2, x2 = (float(v) for v in x)
    rr = removal_rates(p)
    g1, dg1 = p.mu1._f(s1), p.mu1._df(s1)
    g2, dg2 = p.mu2._f(s2), p.mu2._df(s2)
    return np.array([
        [-p.D - p.k1 * dg1 * x1, -p.k1 * g1, 0.0, 0.0],
        [dg1 * x1, g1 - rr.D1, 0.0, 0.0],
        [p.k2 * dg1 * x1, p.k2 * g1, -p.D - p.k3 * dg2 * x2, -p.k3 * g2],
        [0.0, 0.0, dg2 * x2, g2 - rr.D2],
    ])


# -- eigenvalues ----------------------------------------------------------------

def cubic_coefficients(A: np.ndarray) -> tuple[float, float, float]:
    """``(c1, c2, c3)`` of ``det(lambda*I - A) = lambda^3 + c1*lambda^2 + c2*lambda + c3``."""
    c1 = -(A[0, 0] + A[1, 1] + A[2, 2])
    c2 = (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
          + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
          + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
    c3 = -(A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
           - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
           + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]))
    return c1, c2, c3


def _quadratic_roots(tr: float, det: float) -> list[complex]:
    disc = tr * tr - 4.0 * det
    if disc >= 0:
        sq = math.sqrt(disc)
        big = 0.5 * (tr + math.copysign(sq, tr)) if tr != 0 else 0.5 * sq
        if big == 0:
            return [complex(0.0), complex(0.0)]
        return [complex(big), complex(det / big)]
    sq = math.sqrt(-disc)
    return [complex(0.5 * tr, 0.5 * sq), complex(0.5 * tr, -0.5 * sq)]


def _cubic_roots(c1: float, c2: float, c3: float) -> list[complex]:
    roots = np.roots([1.0, c1, c2, c3])
    # one Newton polish per root on the monic cubic
    out = []
    for r in roots:
        r = complex(r)
        for _ in range(2):
            f = ((r + c1) * r + c2) * r + c3
            df = (3 * r + 2 * c1) * r + c2
            if df == 0:
                break
            r -= f / df
        out.append(r)
    return out


def _sort_spectrum(vals):
    return sorted(vals, key=lambda z: (-z.real, -z.imag))


def eigenvalues_5x5(M: np.ndarray) -> list[complex]:
    """Spectrum of a block lower triangular 5x5 matrix, sorted by real part descending.

    Raises :class:`StructureError` if the upper-right 3x2 block is not exactly zero.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (5, 5):
        raise StructureError(f"expected a 5x5 matrix, got shape {M.shape}")
    if np.any(M[:3, 3:] != 0.0):
        raise StructureError("upper-right 3x2 block must be zero")
    JF, C = M[:3, :3], M[3:, 3:]
    vals = _cubic_roots(*cubic_coefficients(JF))
    vals += _quadratic_roots(C[0, 0] + C[1, 1], C[0, 0] * C[1, 1] - C[0, 1] * C[1, 0])
    return _sort_spectrum(vals)


# -- Routh-Hurwitz ----------------------------------------------------------------

@dataclass(frozen=True)
class RouthReport:
    m11: float
    m13: float
    m21: float
    m22: float
    m32: float
    theta: float
    c1: float
    c2: float
    c3: float
    c4: float
    c4_expanded: float
    slope_slack: float

    @property
    def c4_discrepancy(self) -> float:
        scale = max(abs(self.c4), abs(self.c4_expanded), 1e-300)
        return abs(self.c4 - self.c4_expanded) / scale

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["c4_discrepancy"] = self.c4_discrepancy
        return d


def routh_at(p: ModelParams, x0k: float, lam1: float) -> RouthReport:
    """Routh-Hurwitz data for the ``(X0, S1, X1)`` block at the root ``x0k``."""
    rr = removal_rates(p)
    D, a0D = p.D, p.alpha0 * p.D
    x1 = xi(p, x0k)
    mu0, dmu0 = p.mu0._f(x0k), p.mu0._df(x0k)
    dmu1 = p.mu1._df(lam1)
    m11 = a0D + dmu0 * x1
    m13 = mu0
    m21 = p.k0 * dmu0 * x1
    m22 = D + p.k1 * dmu1 * x1
    m32 = dmu1 * x1
    theta = p.k0 * mu0 - p.k1 * rr.D1
    c1 = m11 + m22
    c2 = m11 * m22 - theta * m32
    c3 = m32 * (m21 * m13 - theta * m11)
    c4 = c1 * c2 - c3
    P = D * m11 + p.k1 * rr.D1 * m32
    c4e = (p.k1 * m11 * m32 * (a0D - rr.D1) + dmu0 * x1 * c2 + a0D * P + m22 * c2)
    slope_slack = delta_slope(p) - xi_prime(p, x0k)
    return RouthReport(m11, m13, m21, m22, m32, theta, c1, c2, c3, c4, c4e, slope_slack)


def routh_report(p: ModelParams, k_index: int,
                 report: Optional[MultiplicityReport] = None) -> RouthReport:
    """Routh-Hurwitz data for root number ``k_index`` (1-based)."""
    if not p.biomass:
        raise ParameterError("Routh report applies to biomass-dependent hydrolysis")
    rep = report if report is not None else multiplicity(p)
    if not 1 <= k_index <= rep.N:
        raise ParameterError(f"branch k={k_index} does not exist (N={rep.N})")
    return routh_at(p, rep.roots[k_index - 1], rep.lambda1)


# -- verdicts -------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityVerdict:
    analytic: Verdict
    numeric: Verdict
    eigenvalues: tuple
    max_real_part: float
    conditions: tuple
    agreement: bool
    spectral_tol: float
    diagnostics: tuple = ()
    routh: Optional[RouthReport] = None

    @property
    def min_abs_slack(self) -> float:
        return min((abs(s) for _, s in self.conditions), default=math.inf)

    def to_dict(self) -> dict:
        return {
            "analytic": self.analytic.value,
            "numeric": self.numeric.value,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "max_real_part": self.max_real_part,
            "conditions": [[n, s] for n, s in self.conditions],
            "agreement": self.agreement,
            "diagnostics": [[n, v] for n, v in self.diagnostics],
            "routh": None if self.routh is None else self.routh.to_dict(),
        }


def analytic_verdict(conditions) -> Verdict:
    slacks = [s for _, s in conditions]
    if any(s < -SLACK_TOL for s in slacks):
        return Verdict.UNSTABLE
    if all(s > SLACK_TOL for s in slacks):
        return Verdict.STABLE
    return Verdict.MARGINAL


def numeric_verdict(J: np.ndarray) -> tuple[Verdict, list[complex], float, float]:
    ev = eigenvalues_5x5(J)
    mre = ev[0].real
    tol = MARGIN_RTOL * max(1.0, float(np.max(np.abs(J))))
    if mre < -tol:
        v = Verdict.STABLE
    elif mre > tol:
        v = Verdict.UNSTABLE
    else:
        v = Verdict.MARGINAL
    return v, ev, mre, tol


def _verdict(p, rec, conditions, diagnostics=(), routh=None):
    J = jacobian(p, rec.state)
    num, ev, mre, tol = numeric_verdict(J)
    ana = analytic_verdict(conditions)
    decisive = (min((abs(s) for _, s in conditions), default=math.inf) > AGREEMENT_MARGIN
                and abs(mre) > AGREEMENT_MARGIN)
    agreement = not decisive or ana == num
    return StabilityVerdict(ana, num, tuple(ev), mre, tuple(conditions), agreement, tol,
                            tuple(diagnostics), routh)


def _mu2_prime_condition(p, s2, i):
    return (f"mu2'(lambda2_{i}) > 0", p.mu2._df(s2))


def classify_firstorder(p: ModelParams, rec: EquilibriumRecord) -> StabilityVerdict:
    """Verdict for an existing first-order equilibrium.

    The population-1 washout condition is evaluated on the effective feed,
    ``mu1(S1in*) < D1``, which is what the Jacobian of the reduced system
    says. The same condition written with the raw feed ``S1in`` is reported
    as a diagnostic.
    """
    if p.biomass:
        raise ParameterError("classify_firstorder needs first-order hydrolysis")
    if not rec.exists:
        raise ParameterError(f"{rec.label} does not exist")
    rr = removal_rates(p)
    lab, st = rec.label, rec.state
    diag = []
    conds = []
    if lab.j == 0:
        s1s = s1in_star(p)
        conds.append(("mu1(S1in*) < D1", rr.D1 - p.mu1._f(s1s)))
        diag.append(("mu1(S1in) < D1 [raw feed]", rr.D1 - p.mu1._f(p.S1in)))
        if lab.i == 0:
            conds.append(("S2in outside [lambda2_1, lambda2_2]", rr.D2 - p.mu2._f(p.S2in)))
        else:
            conds.append(_mu2_prime_condition(p, st.S2, lab.i))
    else:
        if lab.i == 0:
            conds.append(("S2in + k2/k1*S1in* outside [H1, H2]", rr.D2 - p.mu2._f(st.S2)))
        else:
            conds.append(_mu2_prime_condition(p, st.S2, lab.i))
    return _verdict(p, rec, conds, diag)


def classify_biomass(p: ModelParams, rec: EquilibriumRecord,
                     report: Optional[MultiplicityReport] = None) -> StabilityVerdict:
    """Verdict for an existing biomass-dependent equilibrium.

    Coexistence branches ``E1ik`` additionally require ``mu2'(lambda2_i) > 0``
    (true only on the low branch); the verdict without that requirement is
    kept in the diagnostics.
    """
    if not p.biomass:
        raise ParameterError("classify_biomass needs biomass-dependent hydrolysis")
    if not rec.exists:
        raise ParameterError(f"{rec.label} does not exist")
    rr = removal_rates(p)
    lab, st = rec.label, rec.state
    conds, diag = [], []
    routh = None
    if lab.j == 0:
        conds.append(("mu1(S1in) < D1", rr.D1 - p.mu1._f(p.S1in)))
        if lab.i == 0:
            conds.append(("mu2(S2in) < D2", rr.D2 - p.mu2._f(p.S2in)))
        else:
            conds.append(_mu2_prime_condition(p, st.S2, lab.i))
    else:
        routh = routh_at(p, st.X0, st.S1)
        conds.append(("xi'(X0k) < -alpha0*D*k0/(k1*D1)", routh.slope_slack))
        conds.append(("c4 > 0", routh.c4))
        if lab.i == 0:
            conds.append(("S2k* outside [lambda2_1, lambda2_2]", rr.D2 - p.mu2._f(st.S2)))
        else:
            table_only = analytic_verdict(conds)
            diag.append(("table verdict without i=1 requirement", table_only.value))
            conds.append(_mu2_prime_condition(p, st.S2, lab.i))
    return _verdict(p, rec, conds, diag, routh)


def classify(p: ModelParams, rec: EquilibriumRecord) -> StabilityVerdict:
    return classify_biomass(p, rec) if p.biomass else classify_firstorder(p, rec)


def reduced_verdict(p: ModelParams, state: State) -> Verdict:
    """Numeric verdict from the reduced four-state Jacobian (first-order mode)."""
    J = reduced_jacobian_firstorder(p, state)
    mre = max(np.linalg.eigvals(J).real)
    tol = MARGIN_RTOL * max(1.0, float(np.max(np.abs(J))))
    if mre < -tol:
        return Verdict.STABLE
    if mre > tol:
        return Verdict.UNSTABLE
    return Verdict.MARGINAL
