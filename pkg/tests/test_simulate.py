import math

import numpy as np
import pytest

import triad.simulate as sim
from triad.equilibria import equilibria, equilibria_firstorder, existing, x0_star_firstorder
from triad.errors import DomainError, StiffnessError
from triad.model import omega_bound, total_mass
from triad.simulate import SimConfig, check_omega, detect_convergence, integrate
from triad.stability import Verdict, classify


def by_label(recs):
    return {str(r.label): r for r in recs}


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(t_end=0.0)
    with pytest.raises(DomainError):
        SimConfig(t_end=1.0, rtol=0.0)
    with pytest.raises(DomainError):
        SimConfig(t_end=1.0, record_stride=0)


def test_negative_start_rejected(fo_params):
    with pytest.raises(DomainError):
        integrate(fo_params, (1, 1, -1, 1, 1), SimConfig(t_end=1.0))


def test_times_strictly_increasing(fo_params):
    tr = integrate(fo_params, (1, 1, 1, 1, 1), SimConfig(t_end=20.0))
    assert np.all(np.diff(tr.times) > 0)
    assert tr.times[0] == 0.0 and tr.times[-1] == 20.0
    assert tr.states.shape == (len(tr.times), 5)


def test_stable_equilibrium_is_fixed(fo_params):
    e = by_label(equilibria_firstorder(fo_params))["E11"]
    tr = integrate(fo_params, e.state, SimConfig(t_end=200.0))
    assert np.max(np.abs(tr.states - np.array(e.state))) <= 1e-10
    status, label = detect_convergence(tr, fo_params, equilibria(fo_params))
    assert status == "ConvergedTo" and str(label) == "E11"


def test_exact_saddle_start_stays(fo_params):
    e = by_label(equilibria_firstorder(fo_params))["E12"]
    assert classify(fo_params, e).numeric == Verdict.UNSTABLE
    tr = integrate(fo_params, e.state, SimConfig(t_end=20.0))
    status, label = detect_convergence(tr, fo_params, equilibria(fo_params))
    assert (status, str(label)) == ("ConvergedTo", "E12")


@pytest.mark.parametrize("which", ["fo_params", "bd_params"])
def test_washout_face_invariant(which, request):
    p = request.getfixturevalue(which)
    tr = integrate(p, (3.0, 2.0, 0.0, 5.0, 1.0), SimConfig(t_end=100.0))
    assert np.all(tr.states[:, 2] == 0.0)
    tr = integrate(p, (3.0, 2.0, 1.0, 5.0, 0.0), SimConfig(t_end=100.0))
    assert np.all(tr.states[:, 4] == 0.0)


@pytest.mark.parametrize("x00", [0.0, 5.0, 80.0])
def test_firstorder_x0_follows_closed_form(fo_params, x00):
    p = fo_params
    rate = p.k_hyd + p.alpha0 * p.D
    xs = x0_star_firstorder(p)
    T = 30.0 / rate
    tr = integrate(p, (x00, 1.0, 1.0, 1.0, 1.0), SimConfig(t_end=T))
    exact = xs + (x00 - xs) * np.exp(-rate * tr.times)
    np.testing.assert_allclose(tr.states[:, 0], exact, rtol=1e-7, atol=1e-9)
    d = np.diff(tr.states[:, 0])
    assert np.all(d * np.sign(xs - x00) >= -1e-12)
    assert abs(tr.states[-1, 0] - xs) <= 1e-6


def test_omega_positively_invariant(bd_params):
    p = bd_params
    b = omega_bound(p)
    x = np.array([1.0, 1.0, 0.1, 1.0, 0.01])
    x *= 0.9 * b / total_mass(p, x)
    tr = integrate(p, x, SimConfig(t_end=500.0))
    assert np.max(tr.z_values) <= b * (1 + 1e-6)
    assert check_omega(tr, p).ok


def test_mass_decays_from_outside(bd_params):
    p = bd_params
    b = omega_bound(p)
    x = np.array([1.0, 1.0, 0.1, 1.0, 0.01])
    x *= 3 * b / total_mass(p, x)
    tr = integrate(p, x, SimConfig(t_end=200.0))
    assert tr.z_values[-1] < tr.z_values[0]
    chk = check_omega(tr, p)
    assert chk.ok and chk.worst_excess <= chk.tolerance
    assert not tr.monitor_violations


def test_max_steps_partial(fo_params):
    tr = integrate(fo_params, (1, 1, 1, 1, 1), SimConfig(t_end=1e4, max_steps=10))
    assert tr.terminal_classification == "MaxSteps"
    assert tr.times[-1] < 1e4
    status, _ = detect_convergence(tr, fo_params, equilibria(fo_params))
    assert status == "MaxSteps"


def test_record_stride_thins_output(fo_params):
    full = integrate(fo_params, (1, 1, 1, 1, 1), SimConfig(t_end=50.0))
    thin = integrate(fo_params, (1, 1, 1, 1, 1), SimConfig(t_end=50.0, record_stride=5))
    assert len(thin.times) < len(full.times)
    np.testing.assert_array_equal(thin.final_state, full.final_state)


def test_nan_rhs_raises_stiffness(fo_params, monkeypatch):
    real = sim.make_rhs

    def poisoned(p):
        f = real(p)
        calls = []

        def g(y):
            calls.append(1)
            return f(y) if len(calls) == 1 else [math.nan] * 5
        return g

    monkeypatch.setattr(sim, "make_rhs", poisoned)
    with pytest.raises(StiffnessError) as ei:
        integrate(fo_params, (1.0, 1.0, 0.0, 1.0, 0.0), SimConfig(t_end=10.0))
    assert ei.value.t == 0.0


@pytest.mark.parametrize("which", ["fo_params", "bd_params", "two_root_params"])
def test_perturbed_stable_equilibria_recovered(which, request):
    p = request.getfixturevalue(which)
    recs = equilibria(p)
    rng = np.random.default_rng(0)
    checked = 0
    for rec in existing(recs):
        v = classify(p, rec)
        if v.analytic != Verdict.STABLE:
            continue
        x = np.array(rec.state)
        x = np.maximum(x + 1e-3 * rng.uniform(-1, 1, 5) * np.maximum(x, 1.0), 0.0)
        x[np.array(rec.state) == 0.0] = 0.0
        T = min(40.0 / abs(v.max_real_part), 1e5)
        tr = integrate(p, x, SimConfig(t_end=T, rtol=1e-10, atol=1e-12))
        status, label = detect_convergence(tr, p, recs)
        assert status == "ConvergedTo" and label == rec.label
        checked += 1
    assert checked >= 1


def test_positivity_on_steep_transient(bd_params):
    tr = integrate(bd_params, (0.0, 0.0, 1e-6, 0.0, 1e-6), SimConfig(t_end=300.0))
    assert tr.states.min() >= -1e-10
    assert not [v for v in tr.monitor_violations if v[1].startswith("positivity")]


def test_error_shrinks_with_rtol():
    # per-step error control gives global error roughly ~ rtol**(5/6), so a single
    # halving is too noisy per draw; compare rtol against rtol/16 in aggregate
    from triad.model import removal_rates
    from triad.sampling import draws, random_state_in_omega
    rng = np.random.default_rng(3)
    ratios = []
    for mode in ("first_order", "biomass"):
        for p in draws(30, 4, mode, "moderate"):
            x = random_state_in_omega(rng, p)
            T = 1.0 / removal_rates(p).Dmin
            ref = integrate(p, x, SimConfig(T, rtol=1e-13, atol=1e-15)).final_state
            errs = []
            for rt in (1e-5, 1e-5 / 16):
                fin = integrate(p, x, SimConfig(T, rtol=rt, atol=rt * 1e-2)).final_state
                errs.append(np.max(np.abs(np.array(fin) - np.array(ref))))
            if errs[1] > 0:
                ratios.append(errs[0] / errs[1])
    assert len(ratios) >= 50
    assert math.exp(np.mean(np.log(ratios))) >= 4.0
    assert np.median(ratios) >= 4.0
