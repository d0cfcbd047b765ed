"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` and look for the
``acceptance criteria`` section at the end of the session summary.
"""
import time

import numpy as np
import pytest

from triad.diagram import ScanSpec, labels_in, scan
from triad.equilibria import (equilibria, equilibria_firstorder, existing, multiplicity,
                              s1in_star, x0_star_firstorder)
from triad.kinetics import h_functions, lambda1, lambda2_pair
from triad.model import removal_rates, total_mass
from triad.sampling import draws, random_state_in_omega
from triad.simulate import SimConfig, check_omega, detect_convergence, integrate
from triad.stability import Verdict, classify, reduced_verdict, routh_report
from triad.validate import (agreement_suite, multiplicity_draws, multiplicity_suite,
                            residual_suite, routh_suite)

pytestmark = pytest.mark.acceptance

MODES = ("first_order", "biomass")
SEED = 20240501
N_DRAWS = 500


def test_residuals(report):
    t0 = time.perf_counter()
    out = [residual_suite(N_DRAWS, SEED, m) for m in MODES]
    secs = time.perf_counter() - t0
    n_fail = sum(len(s["failures"]) for s in out)
    worst = max(s["max_scaled_residual"] for s in out)
    n_eq = sum(s["equilibria"] for s in out)
    ok = n_fail == 0 and secs < 10.0
    report("residual suite", ok, f"{n_eq} equilibria over 2x{N_DRAWS} draws, "
           f"max scaled residual {worst:.2e}, {n_fail} failures, {secs:.1f} s")
    assert ok


def test_stability_agreement(report):
    t0 = time.perf_counter()
    out = [agreement_suite(N_DRAWS, SEED, m) for m in MODES]
    secs = time.perf_counter() - t0
    dis = sum(len(s["disagreements"]) for s in out)
    compared = sum(s["compared"] for s in out)
    ok = dis == 0 and compared > 0 and secs < 30.0
    report("analytic vs numeric stability", ok,
           f"{compared} compared, {dis} disagreements, {secs:.1f} s")
    assert ok


def test_multiplicity_oracle(report):
    out = multiplicity_suite(200, SEED)
    ok = not out["mismatches"] and out["seconds"] < 20.0
    report("multiplicity oracle", ok,
           f"N histogram {out['N_histogram']}, {out['excluded_tangency']} tangency-adjacent "
           f"excluded, {len(out['mismatches'])} mismatches, {out['seconds']:.1f} s")
    assert ok
    assert set(out["N_histogram"]) == {"0", "1", "2"}


def test_routh_identities(report):
    wide = routh_suite(N_DRAWS, SEED)
    # the random wide draws rarely give two roots, so add the multiplicity draws
    worst, signs, branches = wide["max_c4_rel_discrepancy"], wide["sign_failures"], wide["branches"]
    for p in multiplicity_draws(200, SEED):
        rep = multiplicity(p)
        for k in range(1, rep.N + 1):
            r = routh_report(p, k, rep)
            branches += 1
            worst = max(worst, r.c4_discrepancy)
            signs += int(np.sign(r.c3) != np.sign(r.slope_slack))
    ok = worst <= 1e-9 and signs == 0 and branches > 0
    report("Routh identities", ok, f"{branches} branches, max relative c4 discrepancy "
           f"{worst:.1e}, {signs} sign failures")
    assert ok


def test_positivity_and_mass_envelope(report):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst_neg, worst_rel, bad = 0.0, -np.inf, 0
    n = 0
    for mode in MODES:
        for i, p in enumerate(draws(50, SEED + 1, mode, "moderate")):
            x = np.array(random_state_in_omega(rng, p))
            if i % 2:
                x *= 3.0  # start outside the absorbing set too
            tr = integrate(p, x, SimConfig(t_end=50.0 / removal_rates(p).Dmin))
            chk = check_omega(tr, p, 1e-6 * total_mass(p, x))
            worst_neg = min(worst_neg, float(tr.states.min()))
            worst_rel = max(worst_rel, chk.worst_excess / total_mass(p, x))
            bad += int(not chk.ok)
            n += 1
    secs = time.perf_counter() - t0
    ok = worst_neg >= -1e-10 and bad == 0 and secs < 60.0
    report("positivity and mass envelope", ok,
           f"{n} trajectories, min component {worst_neg:.1e}, max (Z - envelope)/Z0 "
           f"{worst_rel:.1e}, {bad} envelope violations, {secs:.1f} s")
    assert ok


def test_firstorder_decoupling(report):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for p in draws(50, SEED + 2, "first_order", "moderate"):
        rate = p.k_hyd + p.alpha0 * p.D
        x = random_state_in_omega(rng, p)
        tr = integrate(p, x, SimConfig(t_end=30.0 / rate))
        worst = max(worst, abs(tr.states[-1, 0] - x0_star_firstorder(p)))
    mism = checked = 0
    for p in draws(N_DRAWS, SEED, "first_order"):
        for rec in existing(equilibria_firstorder(p)):
            checked += 1
            mism += int(classify(p, rec).numeric != reduced_verdict(p, rec.state))
    ok = worst <= 1e-6 and mism == 0
    report("first-order decoupling", ok,
           f"max |X0(T) - X0*| {worst:.1e} over 50 draws; 5D vs reduced 4D verdict "
           f"{mism} mismatches over {checked} equilibria")
    assert ok


def _multistable(mode, seed, want):
    out = []
    for p in draws(2000, seed, mode, "moderate"):
        recs = equilibria(p)
        verdicts = [(r, classify(p, r)) for r in existing(recs)]
        if sum(v.analytic == Verdict.STABLE for _, v in verdicts) >= 2:
            out.append((p, recs, verdicts))
            if len(out) == want:
                break
    return out


def test_dynamic_confirmation_of_les(report):
    sel = _multistable("first_order", 21, 25) + _multistable("biomass", 22, 25)
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    returned = failures = generic = generic_unstable = 0
    worst = 0.0
    for p, recs, verdicts in sel:
        for rec, v in verdicts:
            if v.analytic != Verdict.STABLE:
                continue
            eq = np.array(rec.state)
            x = np.maximum(eq + 1e-3 * (1.0 + np.abs(eq)) * rng.uniform(-1, 1, 5), 0.0)
            T = min(40.0 / abs(v.max_real_part), 1e5)
            tr = integrate(p, x, SimConfig(t_end=T, rtol=1e-10, atol=1e-12))
            d = float(np.max(np.abs(tr.states[-1] - eq)))
            worst = max(worst, d)
            if d <= 1e-6 and detect_convergence(tr, p, recs)[1] == rec.label:
                returned += 1
            else:
                failures += 1
        labels = {r.label: r for r in recs}
        for _ in range(4):
            x = random_state_in_omega(rng, p)
            tr = integrate(p, x, SimConfig(t_end=50.0 / removal_rates(p).Dmin))
            status, lab = detect_convergence(tr, p, recs)
            if lab is not None:
                generic += 1
                generic_unstable += int(classify(p, labels[lab]).analytic == Verdict.UNSTABLE)
    secs = time.perf_counter() - t0
    ok = len(sel) == 50 and failures == 0 and generic_unstable == 0
    report("dynamic confirmation of LES", ok,
           f"{len(sel)} multistable draws, {returned} stable equilibria recovered "
           f"(max distance {worst:.1e}), {failures} failures; {generic} generic starts "
           f"converged, {generic_unstable} to an unstable equilibrium, {secs:.1f} s")
    assert ok


# -- diagram thresholds ----------------------------------------------------------

def _flip_near(p, axis, t, has_label, n=41, span=0.2):
    """1D scan over ``[(1-span)t, (1+span)t]``; the predicate must flip once, within a cell of ``t``."""
    spec = ScanSpec(p, axis, ((1 - span) * t, (1 + span) * t), n)
    row = scan(spec).cells[0]
    width = 2 * span * t / (n - 1)
    flips = [(a.x_val, b.x_val) for a, b in zip(row, row[1:])
             if has_label(a.signature) != has_label(b.signature)]
    sig_change = all(a.signature != b.signature for a, b in zip(row, row[1:])
                     if has_label(a.signature) != has_label(b.signature))
    return (len(flips) == 1 and sig_change
            and flips[0][0] - width <= t <= flips[0][1] + width)


def _has(label):
    return lambda sig: label in labels_in(sig)


def _threshold_cases():
    """(name, params, axis, threshold, predicate) for random draws of both modes."""
    cases = []
    for p in draws(1000, SEED + 3, "first_order"):
        rr = removal_rates(p)
        pair = lambda2_pair(p.mu2, rr.D2)
        lam1 = lambda1(p.mu1, rr.D1)
        if pair is not None:
            cases.append(("S2in = lambda2_1", p, "S2in", pair[0], _has("E01")))
        if lam1 is not None:
            t = lam1 - (s1in_star(p) - p.S1in)
            if t > 0:
                cases.append(("S1in* = lambda1", p, "S1in", t, _has("E10")))
            if pair is not None and s1in_star(p) > 1.1 * lam1:
                t = h_functions(lam1, pair, p.k1, p.k2)[0] - p.k2 / p.k1 * s1in_star(p)
                if t > 0:
                    cases.append(("S2in + k2/k1 S1in* = H1", p, "S2in", t, _has("E11")))
    for p in multiplicity_draws(200, SEED + 4):
        rep = multiplicity(p)
        if rep.slope_condition and rep.s1in_bar and 0 < rep.s1in_bar < 0.8 * rep.lambda1:
            cases.append(("S1in = S1in_bar", p, "S1in", rep.s1in_bar, _has("E10k1")))
    return cases


def test_diagram_thresholds(report, fo_params, two_root_params):
    per = {}
    for name, p, axis, t, pred in _threshold_cases():
        bucket = per.setdefault(name, [0, 0])
        if bucket[0] >= 20:
            continue
        bucket[0] += 1
        bucket[1] += int(not _flip_near(p, axis, t, pred))
    # fixed reference points as well
    p = fo_params.replace(k2=1.0)
    lam1 = lambda1(p.mu1, removal_rates(p).D1)
    pair = lambda2_pair(p.mu2, removal_rates(p).D2)
    h1 = h_functions(lam1, pair, p.k1, p.k2)[0] - p.k2 / p.k1 * s1in_star(p)
    fixed = [("S2in = lambda2_1", fo_params, "S2in", pair[0], _has("E01")),
             ("S1in* = lambda1", p.replace(X0in=0.0), "S1in", lam1, _has("E10")),
             ("S2in + k2/k1 S1in* = H1", p, "S2in", h1, _has("E11")),
             ("S1in = S1in_bar", two_root_params.replace(a1=0.3), "S1in", 2.2, _has("E10k1"))]
    for name, q, axis, t, pred in fixed:
        per[name][0] += 1
        per[name][1] += int(not _flip_near(q, axis, t, pred))
    ok = len(per) == 4 and all(b[0] >= 10 and b[1] == 0 for b in per.values())
    detail = "; ".join(f"{k}: {v[0] - v[1]}/{v[0]}" for k, v in per.items())
    report("diagram thresholds", ok, detail)
    assert ok
