"""Trajectory integration with positivity and mass-bound monitors.

The stepper is the Dormand-Prince 5(4) embedded pair with the standard
elementary step-size controller. Accepted steps must keep every component above
``-atol``; an offending step is rejected and retried with half the step.
Step growth is also capped by the stability boundary of the method along the
negative real axis, using the usual ``|k7 - k6| / |y7 - y6|`` estimate of the
dominant Jacobian eigenvalue. Without the cap, steps near a stable equilibrium
overshoot the stability region and round-off is amplified up to the error
tolerance before the controller reacts.
The 5-vector is integrated on plain Python floats, which for a system this
small beats numpy by an order of magnitude.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, StiffnessError
from .model import (ModelParams, State, gronwall_envelope, make_rhs, removal_rates,
                    total_mass)
from .stability import jacobian

log = logging.getLogger(__name__)

# Dormand-Prince tableau (autonomous system, so the nodes are not needed)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
#: Product ``h*rho`` kept below this (the real-axis limit of the method is ~3.3)
H_RHO_MAX = 3.0
# below this relative size |y7 - y6| carries no usable curvature information
_NOISE = 1e-11
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

RUNNING = "Running"
MAX_STEPS = "MaxSteps"


@dataclass(frozen=True)
class SimConfig:
    t_end: float
    rtol: float = 1e-8
    atol: float = 1e-10
    max_steps: int = 1_000_000
    record_stride: int = 1
    monitors_enabled: bool = True

    def __post_init__(self):
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise DomainError("rtol and atol must be positive")
        if self.record_stride < 1 or self.max_steps < 1:
            raise DomainError("record_stride and max_steps must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    z_values: np.ndarray
    monitor_violations: list = field(default_factory=list)
    terminal_classification: str = RUNNING
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def final_state(self) -> State:
        return State(*self.states[-1])


def integrate(p: ModelParams, x0, cfg: SimConfig) -> Trajectory:
    """Integrate from ``x0`` over ``[0, cfg.t_end]``.

    Returns a partial trajectory tagged ``MaxSteps`` if the step budget runs
    out; raises :class:`StiffnessError` if the step size underflows.
    """
    y = [float(v) for v in x0]
    if len(y) != 5 or any(v < 0 for v in y):
        raise DomainError(f"initial state must be 5 nonnegative values, got {x0!r}")
    f = make_rhs(p)
    rtol, atol, t_end = cfg.rtol, cfg.atol, cfg.t_end
    clip_below = -1e-3 * atol
    kz = (p.k0, 1.0, p.k1 - p.k2, 1.0, p.k3)
    if cfg.monitors_enabled:
        z0 = total_mass(p, y)
        dmin = removal_rates(p).Dmin
        zb = p.D / dmin * (p.k0 * p.X0in + p.S1in + p.S2in)
        env_tol = 1e-6 * z0

    t = 0.0
    times, states = [t], [list(y)]
    violations = []
    k1 = f(y)
    # starting step: 1% of the ratio of scaled state to scaled slope (Hairer et al.)
    sc0 = [atol + rtol * abs(v) for v in y]
    d0 = max(abs(v) / s for v, s in zip(y, sc0))
    d1 = max(abs(v) / s for v, s in zip(k1, sc0))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, t_end)
    n_acc = n_rej = 0
    rest = None
    status = RUNNING
    rng = range(5)
    e1, _, e3, e4, e5, e6, e7 = _E
    while t < t_end:
        if n_acc + n_rej >= cfg.max_steps:
            status = MAX_STEPS
            break
        if t + h > t_end:
            h = t_end - t
        if h <= 16 * math.ulp(max(t, 1.0)):
            raise StiffnessError(f"step size underflow at t={t}", t=t, h=h)
        a2, a3, a4, a5, a6, a7 = _A[1:]
        k2 = f([y[c] + h * a2[0] * k1[c] for c in rng])
        k3 = f([y[c] + h * (a3[0] * k1[c] + a3[1] * k2[c]) for c in rng])
        k4 = f([y[c] + h * (a4[0] * k1[c] + a4[1] * k2[c] + a4[2] * k3[c]) for c in rng])
        k5 = f([y[c] + h * (a5[0] * k1[c] + a5[1] * k2[c] + a5[2] * k3[c] + a5[3] * k4[c])
                for c in rng])
        y6 = [y[c] + h * (a6[0] * k1[c] + a6[1] * k2[c] + a6[2] * k3[c] + a6[3] * k4[c]
                          + a6[4] * k5[c]) for c in rng]
        k6 = f(y6)
        # last stage row equals the 5th-order weights (FSAL)
        ynew = [y[c] + h * (a7[0] * k1[c] + a7[2] * k3[c] + a7[3] * k4[c] + a7[4] * k5[c]
                            + a7[5] * k6[c]) for c in rng]
        k7 = f(ynew)
        err = 0.0
        for c in rng:
            e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c]
                     + e7 * k7[c])
            sc = atol + rtol * max(abs(y[c]), abs(ynew[c]))
            q = abs(e) / sc
            if not q <= err:  # lets NaN through, unlike max()
                err = q
        # comparisons written so that NaN fails them and the step is rejected
        if not (err <= 1.0 and all(v >= -atol for v in ynew)):
            n_rej += 1
            if err <= 1.0:
                h *= 0.5
            else:
                h *= max(0.2, 0.9 * err ** -0.2)
            continue
        n_acc += 1
        t += h
        y = [0.0 if v < clip_below else v for v in ynew]
        k1 = k7 if y == ynew else f(y)
        if cfg.monitors_enabled:
            z = sum(kz[c] * y[c] for c in rng)
            env = zb + (z0 - zb) * math.exp(-dmin * t)
            if z > env + env_tol:
                violations.append((t, "omega", z - env))
        if n_acc % cfg.record_stride == 0 or t >= t_end:
            times.append(t)
            states.append(list(y))
        fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h_next = h * fac
        den = math.sqrt(sum((ynew[c] - y6[c]) ** 2 for c in rng))
        if den > _NOISE * (1.0 + max(abs(v) for v in y)):
            rho = math.sqrt(sum((k7[c] - k6[c]) ** 2 for c in rng)) / den
        else:
            # at rest the difference quotient is round-off; ask the Jacobian instead,
            # reusing the last answer while the state has not moved
            if rest is None or max(abs(a - b) for a, b in zip(y, rest[0])) > 1e-6 * (
                    1.0 + max(abs(v) for v in y)):
                rest = (y, float(np.max(np.abs(np.linalg.eigvals(jacobian(p, y))))))
            rho = rest[1]
        if rho * h_next > H_RHO_MAX:
            h_next = max(h, H_RHO_MAX / rho)
        h = h_next
    if times[-1] != t:
        times.append(t)
        states.append(list(y))
    S = np.array(states)
    Z = S @ np.array(kz)
    for c in rng:
        lo = S[:, c].min()
        if lo < -atol:
            violations.append((float(times[int(np.argmin(S[:, c]))]), f"positivity[{c}]", float(-lo)))
    log.debug("integrate: %d accepted, %d rejected steps, status %s", n_acc, n_rej, status)
    return Trajectory(np.array(times), S, Z, violations, status, n_acc, n_rej)


@dataclass(frozen=True)
class OmegaCheck:
    ok: bool
    worst_excess: float
    worst_time: float
    tolerance: float


def check_omega(traj: Trajectory, p: ModelParams, tol_env: Optional[float] = None) -> OmegaCheck:
    """Check ``Z(t)`` against the Gronwall envelope at every recorded time.

    ``worst_excess`` is ``max(Z - envelope)``, negative when the bound holds with room.
    """
    z0 = float(traj.z_values[0])
    if tol_env is None:
        tol_env = 1e-6 * z0
    env = gronwall_envelope(p, z0, traj.times)
    excess = traj.z_values - env
    i = int(np.argmax(excess))
    return OmegaCheck(bool(excess[i] <= tol_env), float(excess[i]), float(traj.times[i]), tol_env)


def detect_convergence(traj: Trajectory, p: ModelParams, records,
                       rel_tol: float = 1e-6, rhs_tol: float = 1e-8):
    """``("ConvergedTo", label)`` if the final state sits on an existing equilibrium.

    Otherwise returns the trajectory's own status (``Running`` or ``MaxSteps``).
    """
    final = traj.states[-1]
    resid = float(np.max(np.abs(make_rhs(p)(list(final)))))
    best = None
    for rec in records:
        if not rec.exists:
            continue
        eq = np.array(rec.state)
        dist = float(np.max(np.abs(final - eq)))
        if dist <= rel_tol * (1.0 + float(np.max(np.abs(eq)))):
            if best is None or dist < best[0]:
                best = (dist, rec.label)
    if best is not None and resid < rhs_tol:
        return ("ConvergedTo", best[1])
    return (traj.terminal_classification, None)
