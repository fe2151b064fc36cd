"""Main iteration loop with pluggable direction strategies.

Strategies produce unit descent directions; the loop composes them with the
one-dimensional proximal step, retries with perturbed directions when a ray
turns out concave, and records a per-iteration trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .dlc import DlcConfig, find_dlc_direction
from .errors import DegenerateSegmentError, NonDescentError, StationaryPointError
from .linesearch import prox_step
from .objectives import Array, Objective, as_point


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    DEGENERATE = "Degenerate"


# Marker returned by a strategy when neither sign of its candidate vector
# descends; the iterate is left unchanged for that index.
SKIP = object()


def gradient_direction(obj: Objective, x) -> Array:
    g = obj.gradient(x)
    gn = float(np.linalg.norm(g))
    if gn == 0.0:
        raise StationaryPointError("gradient is zero")
    return -g / gn


def momentum_direction(obj: Objective, x, prev_dir: Optional[Array], beta: float) -> Array:
    """Normalized blend of the previous direction and the gradient direction.

    Falls back to the plain gradient direction when the blend fails to
    descend or on the first iteration.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    gdir = gradient_direction(obj, x)
    if prev_dir is None:
        return gdir
    blend = beta * prev_dir + (1.0 - beta) * gdir
    bn = float(np.linalg.norm(blend))
    if bn == 0.0:
        return gdir
    blend /= bn
    if float(np.dot(obj.gradient(x), blend)) >= 0.0:
        return gdir
    return blend


def perturb_direction(direction, scale: float, rng: np.random.Generator) -> Array:
    """Unit-normalized dir + scale * (random unit vector)."""
    if scale < 0.0:
        raise ValueError("scale must be nonnegative")
    d = np.asarray(direction, dtype=float)
    if scale == 0.0:
        return d / np.linalg.norm(d)
    q = rng.standard_normal(d.size)
    q /= np.linalg.norm(q)
    out = d + scale * q
    return out / np.linalg.norm(out)


class GradientStrategy:
    kind = "gradient"

    def direction(self, obj, x, state):
        return gradient_direction(obj, x)


class MomentumStrategy:
    kind = "momentum"

    def __init__(self, beta: float = 0.6):
        if not 0.0 < beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        self.beta = beta

    def direction(self, obj, x, state):
        return momentum_direction(obj, x, state.prev_dir, self.beta)


class DlcStrategy:
    kind = "dlc"

    def __init__(self, config: Optional[DlcConfig] = None):
        # Looser tolerances than the standalone direction finder: inside
        # the loop the direction only needs enough accuracy to descend.
        self.config = config or DlcConfig(
            init_rule="perturbed", tol_p=1e-5, max_outer=100, restarts=2
        )

    def direction(self, obj, x, state):
        res = find_dlc_direction(obj, x, self.config, rng=state.rng)
        return res.direction


class CyclicConjugateStrategy:
    """Cycles a conjugate basis with the descent sign rule."""

    kind = "cyclic"

    def __init__(self, basis: Sequence[Array], q_diag: Array):
        self.basis = [np.asarray(b, dtype=float) for b in basis]
        self.q_diag = np.asarray(q_diag, dtype=float)

    def direction(self, obj, x, state):
        i = state.k % len(self.basis)
        g = self.basis[i]
        qx = self.q_diag * x
        s = float(np.dot(g, qx))
        if abs(s) <= 1e-14 * float(np.max(np.abs(qx), initial=0.0)):
            return SKIP
        return -g if s > 0.0 else g


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 10_000
    tol_grad: float = 1e-6
    tau: int = 2
    convex_mode: bool = False
    lambda_const: float = 1.0
    lambda_schedule: Optional[tuple] = None  # (lambda0, c), geometric per cycle
    perturb_scale: float = 0.01
    max_retries: int = 10
    seed: int = 0
    tol_w: Optional[float] = None

    def __post_init__(self):
        if self.lambda_schedule is not None and self.lambda_schedule[1] <= 1.0:
            raise ValueError("schedule growth factor must exceed 1")


@dataclass
class Record:
    k: int
    x: Array
    f: float
    grad_norm: float
    w: float
    t: float
    v: float
    direction_kind: str
    residual: float


@dataclass
class Trace:
    records: List[Record] = field(default_factory=list)
    status: Status = Status.MAX_ITER
    x_final: Optional[Array] = None
    f_final: float = float("nan")
    grad_norm_final: float = float("nan")

    @property
    def f_values(self) -> np.ndarray:
        return np.array([r.f for r in self.records])

    @property
    def iterates(self) -> np.ndarray:
        return np.array([r.x for r in self.records])


@dataclass
class _State:
    k: int = 0
    prev_dir: Optional[Array] = None
    rng: Optional[np.random.Generator] = None


def _lambda_for(config: SolverConfig, k: int, dim: int) -> float:
    if config.lambda_schedule is None:
        return config.lambda_const
    lam0, c = config.lambda_schedule
    return lam0 * c ** (k // dim)


def dppm_minimize(
    obj: Objective, x0, strategy, config: Optional[SolverConfig] = None
) -> Trace:
    """Iterate direction -> proximal step -> update until the gradient is small.

    On a degenerate segment the direction is redrawn with a slight
    perturbation up to ``max_retries`` times before giving up with
    ``Degenerate`` status.
    """
    cfg = config or SolverConfig()
    x = as_point(x0, obj.dim)
    rng = np.random.default_rng(cfg.seed)
    state = _State(rng=rng)
    trace = Trace()

    for k in range(cfg.max_iter):
        state.k = k
        g = obj.gradient(x)
        gn = float(np.linalg.norm(g))
        if gn <= cfg.tol_grad:
            trace.status = Status.CONVERGED
            break
        d = strategy.direction(obj, x, state)
        if d is SKIP:
            trace.records.append(
                Record(k, x.copy(), obj.value(x), gn, 0.0, 0.0, 0.0,
                       strategy.kind, 0.0)
            )
            continue
        t_override = None
        if cfg.convex_mode:
            t_override = _lambda_for(cfg, k, obj.dim)
        step = None
        base_dir = d
        for attempt in range(cfg.max_retries + 1):
            try:
                step = prox_step(
                    obj, x, d, tau=cfg.tau, tol_w=cfg.tol_w,
                    t_override=t_override,
                )
                break
            except DegenerateSegmentError:
                # Concave first cell: redraw around the original direction
                # with a scale that escalates when slight nudges keep
                # failing.  A draw is accepted only if it descends and its
                # own first probe cell looks convex, so accepted draws do
                # not immediately re-trigger the same failure.
                scale = (cfg.perturb_scale or 0.01) * 3.0**attempt
                h = 1.0 / 10**cfg.tau
                fx = obj.value(x)
                for _ in range(20):
                    cand = perturb_direction(base_dir, scale, rng)
                    if float(np.dot(g, cand)) >= 0.0:
                        continue
                    d2 = fx - 2.0 * obj.value(x + h * cand) + obj.value(
                        x + 2.0 * h * cand
                    )
                    if d2 > 0.0:
                        d = cand
                        break
        if step is None:
            trace.status = Status.DEGENERATE
            break
        trace.records.append(
            Record(k, step.next.copy(), step.phi_next, gn, step.w_star,
                   step.t, step.v, strategy.kind, step.residual)
        )
        state.prev_dir = d
        x = step.next
    else:
        trace.status = Status.MAX_ITER

    trace.x_final = x
    trace.f_final = obj.value(x)
    trace.grad_norm_final = float(np.linalg.norm(obj.gradient(x)))
    return trace


def accelerated_dppm(
    obj: Objective, x0, strategy, config: Optional[SolverConfig] = None
) -> Trace:
    """Extrapolated variant for convex objectives with constant t.

    Each round applies the proximal update at the extrapolation point and
    blends with weight 1/theta_k, theta_k = 2/(k+1).  When the optimum is
    known each record's residual slot carries the certified gap bound
    theta_k^2 / t * ||x0 - x*||^2.
    """
    cfg = config or SolverConfig(convex_mode=True)
    t = cfg.lambda_const
    x0 = as_point(x0, obj.dim)
    v = x0.copy()
    rng = np.random.default_rng(cfg.seed)
    state = _State(rng=rng)
    trace = Trace()

    dist0_sq = None
    if obj.optimum_point is not None:
        dist0_sq = float(np.dot(x0 - obj.optimum_point, x0 - obj.optimum_point))

    xk = x0.copy()
    for k in range(1, cfg.max_iter + 1):
        state.k = k
        g = obj.gradient(v)
        gn = float(np.linalg.norm(g))
        if gn <= cfg.tol_grad:
            trace.status = Status.CONVERGED
            break
        theta = 2.0 / (k + 1.0)
        d = strategy.direction(obj, v, state)
        step = prox_step(obj, v, d, tol_w=cfg.tol_w, t_override=t)
        xk = step.next
        bound = (theta * theta / t) * dist0_sq if dist0_sq is not None else float("nan")
        trace.records.append(
            Record(k, xk.copy(), step.phi_next, gn, step.w_star, t,
                   step.v, "accelerated", bound)
        )
        v = v + (xk - v) / theta
        state.prev_dir = d
        if float(np.linalg.norm(obj.gradient(xk))) <= cfg.tol_grad:
            trace.status = Status.CONVERGED
            break
    else:
        trace.status = Status.MAX_ITER

    trace.x_final = xk
    trace.f_final = obj.value(xk)
    trace.grad_norm_final = float(np.linalg.norm(obj.gradient(xk)))
    return trace


@dataclass(frozen=True)
class FejerResult:
    passed: bool
    k0: int


def check_fejer(trace: Trace, x_star) -> FejerResult:
    """Distances to x_star are eventually nonincreasing along the trace."""
    x_star = np.asarray(x_star, dtype=float)
    pts = [r.x for r in trace.records]
    if len(pts) <= 1:
        return FejerResult(True, 0)
    d = np.array([np.linalg.norm(p - x_star) for p in pts])
    ok = d[1:] <= d[:-1] + 1e-12
    if ok.all():
        return FejerResult(True, 0)
    bad = np.nonzero(~ok)[0]
    k0 = int(bad[-1]) + 1
    # Passes when at least one trailing comparison holds from k0 onward.
    return FejerResult(k0 <= len(pts) - 2, k0)
