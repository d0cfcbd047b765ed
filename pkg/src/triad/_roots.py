"""Bracketed bisection used by every scalar solve in the package."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import NumericError

MAX_ITER = 200


@dataclass(frozen=True)
class Root:
    x: float
    residual: float
    iterations: int


def bisect(f: Callable[[float], float], lo: float, hi: float,
           xtol: float = 0.0, max_iter: int = MAX_ITER) -> Root:
    """Find a sign change of ``f`` in ``[lo, hi]`` by bisection.

    Stops when the bracket is no wider than ``xtol``, when it can no longer
    shrink in floating point, or after ``max_iter`` halvings. The endpoint
    with the smaller ``|f|`` is returned together with that residual.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return Root(lo, 0.0, 0)
    if fhi == 0.0:
        return Root(hi, 0.0, 0)
    if (flo > 0) == (fhi > 0):
        raise NumericError("bisection bracket has no sign change",
                           lo=lo, hi=hi, f_lo=flo, f_hi=fhi)
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        it += 1
        if fmid == 0.0:
            return Root(mid, 0.0, it)
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if hi - lo <= xtol:
            break
    if abs(flo) <= abs(fhi):
        return Root(lo, abs(flo), it)
    return Root(hi, abs(fhi), it)
