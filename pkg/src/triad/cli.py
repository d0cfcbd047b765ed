"""Command-line entry point: ``triad {equilibria,simulate,diagram,validate}``.

Exit codes: 0 success, 2 invalid config, 3 integrator stiffness failure,
4 every diagram cell invalid, 5 validation disagreement.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

from . import kinetics
from .config import ConfigError, RunConfig, load_config
from .diagram import extract_boundaries, scan
from .equilibria import equilibria, multiplicity
from .errors import StiffnessError, TriadError
from .model import removal_rates
from .simulate import check_omega, detect_convergence, integrate
from .stability import classify
from .validate import run_all, scaled_residual

log = logging.getLogger("triad")

EXIT_OK, EXIT_CONFIG, EXIT_STIFF, EXIT_GRID, EXIT_DISAGREE = 0, 2, 3, 4, 5


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o))


def _clean(o):
    """Replace non-finite floats so stdout stays strict JSON."""
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _emit(doc, fh=None):
    text = json.dumps(_clean(doc), indent=2, default=_json_default)
    print(text, file=fh or sys.stdout)


def equilibria_report(cfg: RunConfig) -> dict:
    p = cfg.model
    rr = removal_rates(p)
    be = kinetics.break_even(p.mu1, p.mu2, rr.D1, rr.D2)
    rep = {
        "hydrolysis_mode": p.hydrolysis_mode.value,
        "removal_rates": rr._asdict(),
        "break_even": {"lambda1": be.lambda1, "lambda2": be.lambda2,
                       "H": kinetics.h_functions(be.lambda1, be.lambda2, p.k1, p.k2)},
        "equilibria": [],
    }
    if p.biomass:
        rep["multiplicity"] = multiplicity(p).to_dict()
    for rec in equilibria(p):
        d = rec.to_dict()
        if rec.exists:
            d["residual"] = scaled_residual(p, rec)
            d["stability"] = classify(p, rec).to_dict()
        rep["equilibria"].append(d)
    return rep


def cmd_equilibria(args) -> int:
    cfg = load_config(args.config)
    rep = equilibria_report(cfg)
    out = args.out or cfg.output.get("equilibria")
    if out:
        with open(out, "w") as fh:
            _emit(rep, fh)
    _emit(rep)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    p = cfg.model
    try:
        traj = integrate(p, cfg.initial_state(), cfg.sim_config())
    except StiffnessError as exc:
        _emit({"error": "stiffness", "message": str(exc), "t": exc.t}, sys.stderr)
        return EXIT_STIFF
    out = args.out or cfg.output.get("trajectory")
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["t", "X0", "S1", "X1", "S2", "X2", "Z"])
        for t, x, z in zip(traj.times, traj.states, traj.z_values):
            w.writerow([_fmt(t)] + [_fmt(v) for v in x] + [_fmt(z)])
    finally:
        if out:
            fh.close()
    status, label = detect_convergence(traj, p, equilibria(p))
    omega = check_omega(traj, p)
    for t, name, mag in traj.monitor_violations:
        print(f"monitor violation: t={t!r} {name} magnitude={mag!r}", file=sys.stderr)
    summary = {"terminal": status, "label": None if label is None else str(label),
               "steps": traj.n_steps, "rejected": traj.n_rejected,
               "omega_ok": omega.ok, "omega_worst_excess": omega.worst_excess,
               "violations": len(traj.monitor_violations)}
    _emit(summary, sys.stdout if out else sys.stderr)
    return EXIT_OK


def cmd_diagram(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.scan_spec()
    grid = scan(spec)
    out = args.out or cfg.output.get("grid")
    bout = args.boundaries or cfg.output.get("boundaries")
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["x", "y", "signature", "n_value"])
        for c in grid.flat():
            w.writerow([_fmt(c.x_val), _fmt(c.y_val), c.signature,
                        "" if c.n_value is None else c.n_value])
    finally:
        if out:
            fh.close()
    bounds = extract_boundaries(grid)
    if bout:
        with open(bout, "w", newline="") as bf:
            w = csv.writer(bf)
            w.writerow(["boundary", "signature_a", "signature_b", "x", "y"])
            for i, b in enumerate(bounds):
                for x, y in b.points:
                    w.writerow([i, b.sig_a, b.sig_b, _fmt(x), _fmt(y)])
    n = spec.nx * spec.ny
    summary = {"cells": n, "invalid": grid.n_invalid, "boundaries": len(bounds)}
    _emit(summary, sys.stdout if out else sys.stderr)
    if grid.n_invalid == n:
        return EXIT_GRID
    return EXIT_OK


def _strip_timing(o):
    """Drop wall-clock fields so a fixed seed prints an identical summary."""
    if isinstance(o, dict):
        return {k: _strip_timing(v) for k, v in o.items() if k != "seconds"}
    if isinstance(o, list):
        return [_strip_timing(v) for v in o]
    return o


def cmd_validate(args) -> int:
    summary = run_all(args.draws, args.seed)
    _emit(_strip_timing(summary))
    if not summary["ok"]:
        for s in summary["suites"]:
            bad = s.get("disagreements") or s.get("failures")
            if bad:
                repro = {"model": bad[0]["params"], "seed": args.seed}
                print("reproduction config:", file=sys.stderr)
                _emit(repro, sys.stderr)
                break
        return EXIT_DISAGREE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="triad", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    e = sub.add_parser("equilibria", help="list equilibria with existence and stability")
    e.add_argument("config")
    e.add_argument("--out")
    e.set_defaults(func=cmd_equilibria)
    s = sub.add_parser("simulate", help="integrate a trajectory to CSV")
    s.add_argument("config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)
    d = sub.add_parser("diagram", help="scan an operating diagram")
    d.add_argument("config")
    d.add_argument("--out")
    d.add_argument("--boundaries")
    d.set_defaults(func=cmd_diagram)
    v = sub.add_parser("validate", help="randomized analytic-vs-numeric checks")
    v.add_argument("--draws", type=int, default=500)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    level = os.environ.get("TRIAD_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _emit({"error": "config", "where": exc.where, "message": str(exc)}, sys.stderr)
        return EXIT_CONFIG
    except TriadError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
