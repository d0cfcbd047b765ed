"""JSON run configuration: schema, loading and round-trip serialization.

A config is one JSON object::

    {
      "model": {"hydrolysis_mode": "first_order", "D": 0.3, "S1in": 10, ...,
                "mu1": {"kind": "monod", "m": 1.2, "K": 7.1},
                "mu2": {"kind": "haldane", "m": 0.74, "K": 9.28, "KI": 16}},
      "sim":   {"t_end": 200, "x0": {"X0": 1, "S1": 1, "X1": 1, "S2": 1, "X2": 1}},
      "scan":  {"axis_x": "S2in", "x_range": [0.1, 30], "nx": 50},
      "output": {"equilibria": "eq.json", "trajectory": "traj.csv",
                 "grid": "grid.csv", "boundaries": "bnd.csv"},
      "seed": 0
    }

Unknown keys are rejected at every level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import jsonschema

from .diagram import AXES, ScanSpec
from .errors import TriadError
from .model import ModelParams, State
from .simulate import SimConfig

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}

_CURVE = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind", "m", "K"],
         "properties": {"kind": {"const": "monod"}, "m": _pos, "K": _pos}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "c"],
         "properties": {"kind": {"const": "linear"}, "c": _pos}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "m", "K", "KI"],
         "properties": {"kind": {"const": "haldane"}, "m": _pos, "K": _pos, "KI": _pos}},
    ]
}

MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["D", "S1in", "S2in", "mu1", "mu2"],
    "properties": {
        "hydrolysis_mode": {"enum": ["first_order", "biomass"]},
        "k0": _pos, "k1": _pos, "k2": _nonneg, "k3": _pos, "k_hyd": _nonneg,
        "alpha0": _pos, "alpha1": _nonneg, "alpha2": _nonneg,
        "a1": _nonneg, "a2": _nonneg, "D": _pos,
        "X0in": _nonneg, "S1in": _nonneg, "S2in": _nonneg,
        "mu0": _CURVE, "mu1": _CURVE, "mu2": _CURVE,
    },
}

_STATE = {
    "type": "object", "additionalProperties": False,
    "required": ["X0", "S1", "X1", "S2", "X2"],
    "properties": {k: _nonneg for k in ("X0", "S1", "X1", "S2", "X2")},
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": MODEL_SCHEMA,
        "sim": {
            "type": "object", "additionalProperties": False, "required": ["t_end", "x0"],
            "properties": {
                "t_end": _pos, "rtol": _pos, "atol": _pos,
                "max_steps": {"type": "integer", "minimum": 1},
                "record_stride": {"type": "integer", "minimum": 1},
                "monitors_enabled": {"type": "boolean"},
                "x0": _STATE,
            },
        },
        "scan": {
            "type": "object", "additionalProperties": False,
            "required": ["axis_x", "x_range", "nx"],
            "properties": {
                "axis_x": {"enum": list(AXES)}, "axis_y": {"enum": list(AXES)},
                "x_range": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                "y_range": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                "nx": {"type": "integer", "minimum": 2},
                "ny": {"type": "integer", "minimum": 1},
            },
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {k: {"type": "string"}
                           for k in ("equilibria", "trajectory", "grid", "boundaries")},
        },
        "seed": {"type": "integer"},
    },
}


class ConfigError(TriadError, ValueError):
    """Config failed to parse or validate; ``where`` locates the problem."""

    def __init__(self, message, where=""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class RunConfig:
    model: ModelParams
    sim: Optional[dict] = None
    scan: Optional[dict] = None
    output: dict = field(default_factory=dict)
    seed: int = 0

    def sim_config(self) -> SimConfig:
        if self.sim is None:
            raise ConfigError("missing 'sim' block", "sim")
        kw = {k: v for k, v in self.sim.items() if k != "x0"}
        return SimConfig(**kw)

    def initial_state(self) -> State:
        if self.sim is None:
            raise ConfigError("missing 'sim' block", "sim")
        return State(**self.sim["x0"])

    def scan_spec(self) -> ScanSpec:
        if self.scan is None:
            raise ConfigError("missing 'scan' block", "scan")
        s = dict(self.scan)
        s["x_range"] = tuple(s["x_range"])
        if "y_range" in s:
            s["y_range"] = tuple(s["y_range"])
        return ScanSpec(base=self.model, **s)

    def to_dict(self) -> dict:
        d = {"model": self.model.to_dict(), "seed": self.seed}
        if self.sim is not None:
            d["sim"] = self.sim
        if self.scan is not None:
            d["scan"] = self.scan
        if self.output:
            d["output"] = self.output
        return d


def parse_config(doc: dict) -> RunConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(x) for x in e.absolute_path) or "<root>"
        raise ConfigError(e.message, where)
    try:
        model = ModelParams.from_dict(doc["model"])
    except (TriadError, TypeError) as exc:
        raise ConfigError(str(exc), "model") from exc
    return RunConfig(model=model, sim=doc.get("sim"), scan=doc.get("scan"),
                     output=doc.get("output", {}), seed=doc.get("seed", 0))


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    except OSError as exc:
        raise ConfigError(str(exc), str(path)) from exc
    return parse_config(doc)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)
