"""Operating diagrams: equilibrium/stability signatures over a parameter plane."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .equilibria import equilibria_biomass, equilibria_firstorder, multiplicity
from .errors import DomainError, TriadError
from .model import ModelParams, removal_rates
from .stability import analytic_verdict, classify_biomass, classify_firstorder

AXES = ("D", "S1in", "S2in", "X0in", "a1", "a2", "alpha0", "alpha1", "alpha2", "k_hyd")
INVALID = "INVALID"


@dataclass(frozen=True)
class ScanSpec:
    base: ModelParams
    axis_x: str
    x_range: tuple
    nx: int
    axis_y: Optional[str] = None
    y_range: Optional[tuple] = None
    ny: int = 1

    def __post_init__(self):
        axes = [self.axis_x] + ([self.axis_y] if self.axis_y is not None else [])
        for a in axes:
            if a not in AXES:
                raise DomainError(f"unknown scan axis {a!r}; choose from {AXES}")
        if self.axis_y is not None:
            if self.axis_y == self.axis_x:
                raise DomainError("scan axes must differ")
            if self.ny < 2 or self.y_range is None or not self.y_range[1] > self.y_range[0]:
                raise DomainError("y axis needs ny >= 2 and a positive-length range")
        elif self.ny != 1:
            raise DomainError("ny must be 1 for a one-axis scan")
        if self.nx < 2 or not self.x_range[1] > self.x_range[0]:
            raise DomainError("x axis needs nx >= 2 and a positive-length range")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def ys(self) -> np.ndarray:
        if self.axis_y is None:
            return np.array([math.nan])
        return np.linspace(self.y_range[0], self.y_range[1], self.ny)


@dataclass(frozen=True)
class DiagramCell:
    x_val: float
    y_val: float
    signature: str
    n_value: Optional[int] = None

    @property
    def valid(self) -> bool:
        return self.signature != INVALID


@dataclass
class Grid:
    spec: ScanSpec
    cells: list = field(default_factory=list)  # row-major: cells[iy][ix]

    def flat(self):
        for row in self.cells:
            yield from row

    @property
    def n_invalid(self) -> int:
        return sum(not c.valid for c in self.flat())


def signature(p: ModelParams) -> tuple[str, Optional[int]]:
    """Canonical ``"label:verdict,..."`` string over existing equilibria.

    Verdicts are analytic only; no eigenvalues are computed here.
    """
    removal_rates(p)
    if p.biomass:
        rep = multiplicity(p)
        recs = equilibria_biomass(p, rep)
        n = rep.N
    else:
        recs = equilibria_firstorder(p)
        n = None
    parts = []
    for rec in sorted((r for r in recs if r.exists), key=lambda r: r.label.sort_key):
        v = (classify_biomass(p, rec, rep) if p.biomass else classify_firstorder(p, rec))
        parts.append(f"{rec.label}:{v.analytic.value}")
    return ",".join(parts), n


def _cell(base, spec, x, y):
    changes = {spec.axis_x: float(x)}
    if spec.axis_y is not None:
        changes[spec.axis_y] = float(y)
    try:
        sig, n = signature(base.replace(**changes))
    except TriadError:
        return DiagramCell(float(x), float(y), INVALID, None)
    return DiagramCell(float(x), float(y), sig, n)


def scan(spec: ScanSpec) -> Grid:
    """Evaluate every grid cell in row-major order; invalid parameter cells are flagged."""
    grid = Grid(spec)
    for y in spec.ys:
        grid.cells.append([_cell(spec.base, spec, x, y) for x in spec.xs])
    return grid


@dataclass(frozen=True)
class Boundary:
    sig_a: str
    sig_b: str
    points: tuple  # (x, y) midpoints


def extract_boundaries(grid: Grid) -> list[Boundary]:
    """Edge midpoints between neighbouring cells whose signatures differ.

    Points are grouped by the unordered pair of signatures on either side and
    sorted, so a single threshold crossing gives one polyline.
    """
    groups: dict = {}
    rows = grid.cells
    ny, nx = len(rows), len(rows[0]) if rows else 0
    for iy in range(ny):
        for ix in range(nx):
            a = rows[iy][ix]
            for jy, jx in ((iy, ix + 1), (iy + 1, ix)):
                if jy >= ny or jx >= nx:
                    continue
                b = rows[jy][jx]
                if a.signature == b.signature:
                    continue
                key = tuple(sorted((a.signature, b.signature)))
                mid = (0.5 * (a.x_val + b.x_val), 0.5 * (a.y_val + b.y_val))
                groups.setdefault(key, []).append(mid)
    return [Boundary(k[0], k[1], tuple(sorted(v, key=lambda q: (q[1], q[0]))))
            for k, v in sorted(groups.items())]


def labels_in(sig: str) -> dict:
    """``{"E00": "S", ...}`` from a signature string."""
    if not sig or sig == INVALID:
        return {}
    return dict(part.split(":") for part in sig.split(","))
