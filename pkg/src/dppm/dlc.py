"""Search for a direction with a local convex segment (a DLC direction).

At a non-critical point x we seek the shortest p with

    f(x + p) + delta <= f(x) + grad f(x)' p      (convex-crossing constraint)
    grad f(x)' p <= 0                            (descent constraint)

via a penalty-linearization outer loop.  Each outer iteration solves the
two-variable dual of the linearized subproblem exactly by active-set
enumeration, then recovers the primal step in closed form, so the per-step
cost is independent of the problem dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import StationaryPointError, UnboundedDualError
from .objectives import Array, Objective, as_point

_EPS = 1e-14


@dataclass(frozen=True)
class DlcSubproblem:
    """Anchor data for one penalty-linearization solve."""

    x: Array
    fx: float
    gx: Array
    delta: float
    mu: float
    p0: Array

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True)
class DualPoint:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda1 < 0.0 or self.lambda2 < 0.0:
            raise ValueError("multipliers must be nonnegative")


@dataclass(frozen=True)
class Linearization:
    """Constraint values and gradients at the current estimate p0."""

    g1: float
    g2: float
    grad_g0: Array
    grad_g1: Array
    grad_g2: Array


@dataclass(frozen=True)
class DlcResult:
    direction: Array
    magnitude: float
    dual: DualPoint
    converged: bool
    outer_iters: int


@dataclass(frozen=True)
class DlcConfig:
    """Knobs for the outer loop; mu matches the paper's experiment."""

    delta: Optional[float] = None  # default 1e-6 * (1 + |f(x)|)
    mu: float = 1000.0
    max_outer: int = 2000
    tol_p: float = 1e-8
    init_rule: str = "gradient"  # "gradient" or "perturbed"
    restarts: int = 10
    seed: int = 0


def g_values(sub: DlcSubproblem, p, obj: Objective):
    """Evaluate (g0, g1, g2) of the direction program at p."""
    p = as_point(p, obj.dim)
    g0 = 0.5 * float(np.dot(p, p))
    g1 = obj.value(sub.x + p) + sub.delta - sub.fx - float(np.dot(sub.gx, p))
    g2 = float(np.dot(sub.gx, p))
    return g0, g1, g2


def linearized_constraints(sub: DlcSubproblem, obj: Objective) -> Linearization:
    """Constraint values and gradients at p0 for the linearized subproblem."""
    p0 = sub.p0
    _, g1, g2 = g_values(sub, p0, obj)
    return Linearization(
        g1=g1,
        g2=g2,
        grad_g0=p0.copy(),
        grad_g1=obj.gradient(sub.x + p0) - sub.gx,
        grad_g2=sub.gx.copy(),
    )


def _dual_coefficients(sub: DlcSubproblem, lin: Linearization):
    """Concave quadratic d(lam) = b'lam - 1/2 lam'A lam + const."""
    a1, a2 = lin.grad_g1, lin.grad_g2
    g0v = lin.grad_g0
    mu = sub.mu
    b = np.array(
        [lin.g1 - np.dot(g0v, a1) / mu, lin.g2 - np.dot(g0v, a2) / mu]
    )
    A = (
        np.array(
            [
                [np.dot(a1, a1), np.dot(a1, a2)],
                [np.dot(a1, a2), np.dot(a2, a2)],
            ]
        )
        / mu
    )
    const = -float(np.dot(g0v, g0v)) / (2.0 * mu)
    return b, A, const


def dual_value(lam: DualPoint, sub: DlcSubproblem, lin: Linearization) -> float:
    """d(lam) with the constraint gradients inside the squared norm."""
    h = (
        lin.grad_g0
        + lam.lambda1 * lin.grad_g1
        + lam.lambda2 * lin.grad_g2
    )
    return (
        lam.lambda1 * lin.g1
        + lam.lambda2 * lin.g2
        - float(np.dot(h, h)) / (2.0 * sub.mu)
    )


def maximize_dual(sub: DlcSubproblem, lin: Linearization) -> DualPoint:
    """Exact maximizer of the concave 2-variable dual over the quadrant.

    Enumerates the four active sets; when the free 2x2 system is singular
    only the restricted cases compete.  Raises :class:`UnboundedDualError`
    when a feasible ray of ascent exists (zero curvature with positive
    slope), which signals a degenerate linearization to the caller.
    """
    b, A, _ = _dual_coefficients(sub, lin)
    scale = max(1.0, abs(b[0]), abs(b[1]), A[0, 0], A[1, 1])
    tiny = _EPS * scale

    # Feasible rays of zero curvature with positive slope: unbounded above.
    for i in (0, 1):
        if A[i, i] <= tiny and b[i] > 1e-10 * scale:
            raise UnboundedDualError(f"dual unbounded along axis {i + 1}")
    det = A[0, 0] * A[1, 1] - A[0, 1] ** 2
    if det <= tiny * max(A[0, 0], A[1, 1], tiny):
        # Singular Gram: check the null ray when it lies in the quadrant.
        v = np.array([A[1, 1], -A[0, 1]])
        if np.linalg.norm(v) > 0:
            v = v / np.linalg.norm(v)
            if np.all(v >= -1e-12) and np.dot(b, v) > 1e-10 * scale:
                raise UnboundedDualError("dual unbounded along singular ray")
            if np.all(-v >= -1e-12) and np.dot(b, -v) > 1e-10 * scale:
                raise UnboundedDualError("dual unbounded along singular ray")
        interior = None
    else:
        lam = np.linalg.solve(A, b)
        interior = lam if np.all(lam >= 0.0) else None

    candidates = [DualPoint(0.0, 0.0)]
    if A[0, 0] > tiny:
        candidates.append(DualPoint(max(0.0, b[0] / A[0, 0]), 0.0))
    if A[1, 1] > tiny:
        candidates.append(DualPoint(0.0, max(0.0, b[1] / A[1, 1])))
    if interior is not None:
        candidates.append(DualPoint(float(interior[0]), float(interior[1])))

    best = max(candidates, key=lambda lam: dual_value(lam, sub, lin))
    return best


def primal_recover(lam: DualPoint, sub: DlcSubproblem, lin: Linearization) -> Array:
    """p+ = p0 - (1/mu)(grad g0 + sum_i lam_i grad g_i)."""
    h = (
        lin.grad_g0
        + lam.lambda1 * lin.grad_g1
        + lam.lambda2 * lin.grad_g2
    )
    return sub.p0 - h / sub.mu


def _initial_p(gx: Array, rule: str, attempt: int, rng: np.random.Generator) -> Array:
    base = -gx
    if rule == "gradient" and attempt == 0:
        return base
    # Perturbed redraws around the negative gradient, scaled like the
    # experiment's initialization rule.
    q = rng.standard_normal(gx.size)
    q /= np.linalg.norm(q)
    j = rng.integers(0, 10)
    return base + j * 0.5 * np.linalg.norm(gx) * q


def find_dlc_direction(
    obj: Objective, x, config: Optional[DlcConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> DlcResult:
    """Run the penalty-linearization loop until the estimate stalls.

    Returns a converged result only when the linearized constraints hold at
    the fixed point, the direction is descent, and the crossing magnitude is
    clear of the sqrt(2 delta) degenerate floor.  On any failure the
    normalized negative gradient is returned with ``converged=False``.
    """
    cfg = config or DlcConfig()
    x = as_point(x, obj.dim)
    gx = obj.gradient(x)
    gnorm = float(np.linalg.norm(gx))
    if gnorm == 0.0:
        raise StationaryPointError("cannot seek a direction at a stationary point")
    fx = obj.value(x)
    delta = cfg.delta if cfg.delta is not None else 1e-6 * (1.0 + abs(fx))
    floor = math.sqrt(2.0 * delta) * 10.0
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    attempts = 1 if cfg.init_rule == "gradient" else cfg.restarts
    total_outer = 0
    last_lam = DualPoint(0.0, 0.0)
    last_magnitude = 0.0
    for attempt in range(max(1, attempts)):
        p0 = _initial_p(gx, cfg.init_rule, attempt, rng)
        sub = DlcSubproblem(x=x, fx=fx, gx=gx, delta=delta, mu=cfg.mu, p0=p0)
        p_plus = p0
        lam = DualPoint(0.0, 0.0)
        stalled = False
        failed = False
        for _ in range(cfg.max_outer):
            total_outer += 1
            lin = linearized_constraints(sub, obj)
            try:
                lam = maximize_dual(sub, lin)
            except UnboundedDualError:
                failed = True
                break
            p_plus = primal_recover(lam, sub, lin)
            if np.linalg.norm(p_plus - sub.p0) <= cfg.tol_p * (
                1.0 + np.linalg.norm(sub.p0)
            ):
                stalled = True
                break
            sub = DlcSubproblem(
                x=x, fx=fx, gx=gx, delta=delta, mu=cfg.mu, p0=p_plus
            )
        last_lam = lam
        if failed or not stalled:
            continue
        magnitude = float(np.linalg.norm(p_plus))
        if magnitude < floor:
            last_magnitude = magnitude
            continue  # locally strictly concave anchor, unusable
        lin = linearized_constraints(sub, obj)
        step = p_plus - sub.p0
        lin1 = lin.g1 + float(np.dot(lin.grad_g1, step))
        lin2 = lin.g2 + float(np.dot(lin.grad_g2, step))
        direction = p_plus / magnitude
        slope = float(np.dot(gx, direction))
        if lin1 <= 1e-8 and lin2 <= 1e-8 and slope < 0.0:
            return DlcResult(
                direction=direction,
                magnitude=magnitude,
                dual=lam,
                converged=True,
                outer_iters=total_outer,
            )

    return DlcResult(
        direction=-gx / gnorm,
        magnitude=last_magnitude,
        dual=last_lam,
        converged=False,
        outer_iters=total_outer,
    )
