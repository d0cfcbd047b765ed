"""Randomized cross-checks: closed forms against residuals, eigenvalues and grid scans.

Each suite returns a plain dict summary so the CLI can print it as JSON and
the test-suite can assert on it.
"""
from __future__ import annotations

import math
import time

import numpy as np

from .equilibria import EquilibriumRecord, equilibria, multiplicity
from .model import ModelParams, make_rhs
from .sampling import draws
from .stability import AGREEMENT_MARGIN, classify, routh_report

MODES = ("first_order", "biomass")
RESIDUAL_RTOL = 1e-9


def scaled_residual(p: ModelParams, rec: EquilibriumRecord) -> float:
    """``max|rhs| / (1 + max|state|)``."""
    r = make_rhs(p)(list(rec.state))
    return max(abs(v) for v in r) / (1.0 + max(abs(v) for v in rec.state))


def residual_suite(n_draws: int, seed: int, mode: str) -> dict:
    t0 = time.perf_counter()
    worst, n_eq, failures = 0.0, 0, []
    for idx, p in enumerate(draws(n_draws, seed, mode)):
        for rec in equilibria(p):
            if not rec.exists:
                continue
            n_eq += 1
            r = scaled_residual(p, rec)
            worst = max(worst, r)
            if r > RESIDUAL_RTOL:
                failures.append({"draw": idx, "label": str(rec.label), "residual": r,
                                 "params": p.to_dict()})
    return {"suite": "residual", "mode": mode, "draws": n_draws, "equilibria": n_eq,
            "max_scaled_residual": worst, "failures": failures,
            "seconds": time.perf_counter() - t0}


def agreement_suite(n_draws: int, seed: int, mode: str,
                    margin: float = AGREEMENT_MARGIN) -> dict:
    """Analytic vs eigenvalue verdicts where both are decisive by ``margin``."""
    t0 = time.perf_counter()
    compared = skipped = 0
    disagreements = []
    worst_slack_disagreement = 0.0
    for idx, p in enumerate(draws(n_draws, seed, mode)):
        for rec in equilibria(p):
            if not rec.exists:
                continue
            v = classify(p, rec)
            if v.min_abs_slack > margin and abs(v.max_real_part) > margin:
                compared += 1
                if v.analytic != v.numeric:
                    worst_slack_disagreement = max(worst_slack_disagreement, v.min_abs_slack)
                    disagreements.append({"draw": idx, "label": str(rec.label),
                                          "analytic": v.analytic.value,
                                          "numeric": v.numeric.value,
                                          "conditions": [list(c) for c in v.conditions],
                                          "max_real_part": v.max_real_part,
                                          "params": p.to_dict()})
            else:
                skipped += 1
    return {"suite": "agreement", "mode": mode, "draws": n_draws, "compared": compared,
            "skipped_marginal": skipped, "disagreements": disagreements,
            "worst_slack_disagreement": worst_slack_disagreement,
            "seconds": time.perf_counter() - t0}


def routh_suite(n_draws: int, seed: int) -> dict:
    t0 = time.perf_counter()
    branches, worst_c4, sign_failures = 0, 0.0, 0
    for p in draws(n_draws, seed, "biomass"):
        rep = multiplicity(p)
        for k in range(1, rep.N + 1):
            r = routh_report(p, k, rep)
            branches += 1
            worst_c4 = max(worst_c4, r.c4_discrepancy)
            if np.sign(r.c3) != np.sign(r.slope_slack):
                sign_failures += 1
    return {"suite": "routh", "draws": n_draws, "branches": branches,
            "max_c4_rel_discrepancy": worst_c4, "sign_failures": sign_failures,
            "seconds": time.perf_counter() - t0}


# -- brute-force multiplicity oracle -------------------------------------------

def _curve_values(curve, x):
    kind = curve.kind
    if kind == "monod":
        return curve.m * x / (curve.K + x)
    if kind == "linear":
        return curve.c * x
    raise ValueError(kind)


def grid_root_count(p: ModelParams, lam1: float, n: int = 100_000) -> tuple[int, float]:
    """Sign changes of ``xi - delta`` on a uniform interior grid of ``(0, X0in/alpha0)``.

    Written from the defining formulas with numpy, independently of
    :mod:`triad.equilibria`. The sign sequence is closed off with the two
    end values, ``+inf`` as X0 -> 0 (``mu0(0) = 0``) and the exact value at
    ``X0in/alpha0``, so roots between the outermost grid point and an end are
    still counted. Returns ``(count, min |xi - delta|)`` over the interior grid.
    """
    upper = p.X0in / p.alpha0
    x = upper * np.arange(1, n + 1) / (n + 1)
    xi_v = p.D * (p.X0in - p.alpha0 * x) / _curve_values(p.mu0, x)
    d1 = p.alpha1 * p.D + p.a1
    de_v = p.D / (p.k1 * d1) * ((p.S1in - lam1) + p.k0 * (p.X0in - p.alpha0 * x))
    phi = xi_v - de_v
    phi_upper = -p.D / (p.k1 * d1) * (p.S1in - lam1)
    s = np.sign(np.concatenate(([1.0], phi, [phi_upper])))
    nz = s[s != 0]
    count = int(np.count_nonzero(nz[1:] != nz[:-1])) + int(np.count_nonzero(s[1:-1] == 0))
    return count, float(np.min(np.abs(phi)))


def multiplicity_draws(n_draws: int, seed: int) -> list[ModelParams]:
    """Half the draws satisfy ``k0*mu0(X0in/alpha0) > k1*D1``, half violate it.

    For half of the satisfying draws ``S1in`` is redrawn uniformly on
    ``[0, 1.2*lambda1]`` so the two-root and zero-root cases get exercised.
    """
    rng = np.random.default_rng(seed)
    want_true = n_draws // 2
    out_true, out_false = [], []
    pool_seed = seed
    while len(out_true) < want_true or len(out_false) < n_draws - want_true:
        pool_seed += 1
        for p in draws(200, pool_seed, "biomass"):
            rep = multiplicity(p)
            if rep.lambda1 is None:
                continue
            if rep.slope_condition and len(out_true) < want_true:
                if len(out_true) % 2 == 1:
                    p = p.replace(S1in=float(rng.uniform(0.0, 1.2 * rep.lambda1)))
                out_true.append(p)
            elif not rep.slope_condition and len(out_false) < n_draws - want_true:
                out_false.append(p)
    return out_true + out_false


def multiplicity_suite(n_draws: int, seed: int, n_grid: int = 100_000,
                       tangency_tol: float = 1e-8) -> dict:
    t0 = time.perf_counter()
    mismatches, excluded, counts = [], 0, {}
    for idx, p in enumerate(multiplicity_draws(n_draws, seed)):
        rep = multiplicity(p)
        count, gap = grid_root_count(p, rep.lambda1, n_grid)
        if gap < tangency_tol:
            excluded += 1
            continue
        counts[rep.N] = counts.get(rep.N, 0) + 1
        if count != rep.N:
            mismatches.append({"draw": idx, "N": rep.N, "grid": count,
                               "case": rep.branch_case, "params": p.to_dict()})
    return {"suite": "multiplicity", "draws": n_draws, "excluded_tangency": excluded,
            "N_histogram": {str(k): v for k, v in sorted(counts.items())},
            "mismatches": mismatches, "seconds": time.perf_counter() - t0}


def run_all(n_draws: int, seed: int) -> dict:
    suites = []
    for mode in MODES:
        suites.append(residual_suite(n_draws, seed, mode))
        suites.append(agreement_suite(n_draws, seed, mode))
    n_dis = sum(len(s.get("disagreements", [])) for s in suites)
    n_res = sum(len(s.get("failures", [])) for s in suites)
    return {"draws": n_draws, "seed": seed, "suites": suites,
            "disagreements": n_dis, "residual_failures": n_res,
            "max_scaled_residual": max((s.get("max_scaled_residual", 0.0) for s in suites),
                                       default=0.0),
            "ok": n_dis == 0 and n_res == 0}
