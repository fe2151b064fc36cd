"""One-dimensional proximal step along a descent direction.

The step solves  min_{w >= 0}  w^2/(2t) + f(x + w p)  restricted to the
convex segment detected along the ray, with t chosen so the minimizer is
guaranteed to stay inside the segment.  The minimizer is located by golden
section search, which uses function values only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateSegmentError, EvaluationError, NonDescentError
from .objectives import Array, Objective, as_point

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class ProxStep:
    """Result of one proximal step along a unit direction."""

    w_star: float
    t: float
    v: float
    next: Array
    phi_next: float
    residual: float
    interior: bool


def detect_convex_segment(
    obj: Objective, x, direction, tau: int = 2, probe_length: float = 1.0
) -> float:
    """Length of the convex segment along ``direction`` from ``x``.

    Partitions the probe interval into 10^tau equal cells and returns the
    step at the first cell where the forward differences start decreasing
    (concavity onset); if they never do, the whole probe length is convex.

    Raises :class:`DegenerateSegmentError` when concavity shows up in the
    very first cell, in which case the caller should pick another
    direction.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if probe_length <= 0.0:
        raise ValueError("probe_length must be positive")
    x = as_point(x, obj.dim)
    d = as_point(direction, obj.dim)
    n = 10**tau
    h = probe_length / n
    vals = np.array([obj.value(x + (k * h) * d) for k in range(n + 1)])
    second = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]  # index k = 1..n-1
    bad = np.nonzero(second < 0.0)[0]
    if bad.size == 0:
        return probe_length
    k = int(bad[0]) + 1
    if k == 1:
        raise DegenerateSegmentError("ray is concave in the first probe cell")
    return k * h


def select_t(v: float, gdot: float, t_override: Optional[float] = None) -> float:
    """Largest admissible proximal parameter t = v / |p' grad f(x)|.

    With ``t_override`` set (constant-t convex mode) the override is
    returned unchanged.
    """
    if t_override is not None:
        return float(t_override)
    if gdot >= 0.0:
        raise NonDescentError("direction has nonnegative slope")
    if v <= 0.0:
        raise ValueError("v must be positive")
    return v / abs(gdot)


def golden_section_min(
    phi: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Argmin of a unimodal phi on [lo, hi] to within tol, values only."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    a, b = lo, hi
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    steps = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = phi(c), phi(d)
    if not (math.isfinite(yc) and math.isfinite(yd)):
        raise EvaluationError("non-finite value in golden section search")
    for _ in range(steps):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI2 * h
            yc = phi(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = phi(d)
        if not (math.isfinite(yc) and math.isfinite(yd)):
            raise EvaluationError("non-finite value in golden section search")
    return 0.5 * (a + b)


def prox_step(
    obj: Objective,
    x,
    direction,
    tau: int = 2,
    tol_w: Optional[float] = None,
    t_override: Optional[float] = None,
    probe_length: float = 1.0,
) -> ProxStep:
    """Detect the segment, pick t, and minimize the 1-D envelope.

    In constant-t mode the segment probe is skipped and the bracket upper
    end is t |p' grad f(x)|, which always contains the minimizer.
    """
    x = as_point(x, obj.dim)
    d = as_point(direction, obj.dim)
    gdot = float(np.dot(obj.gradient(x), d))
    if gdot >= 0.0:
        raise NonDescentError("prox_step requires a descent direction")

    if t_override is None:
        v = detect_convex_segment(obj, x, d, tau=tau, probe_length=probe_length)
        t = select_t(v, gdot)
        hi = v
    else:
        t = float(t_override)
        hi = t * abs(gdot)
        v = hi

    def phi(w: float) -> float:
        return w * w / (2.0 * t) + obj.value(x + w * d)

    tol = tol_w if tol_w is not None else max(1e-13, hi * 1e-10)
    w_star = golden_section_min(phi, 0.0, hi, tol)
    nxt = x + w_star * d
    residual = w_star / t + float(np.dot(obj.gradient(nxt), d))
    interior = w_star < hi - 2.0 * tol
    return ProxStep(
        w_star=w_star,
        t=t,
        v=v,
        next=nxt,
        phi_next=obj.value(nxt),
        residual=residual,
        interior=interior,
    )
