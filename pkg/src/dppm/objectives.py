"""Differentiable objectives and the built-in benchmark problems.

An :class:`Objective` bundles a function value with its gradient.  Built-ins
carry analytic gradients; user objectives may supply only the value, in which
case the gradient falls back to central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidSpectrumError

Array = np.ndarray


def as_point(x, dim: Optional[int] = None) -> Array:
    """Coerce ``x`` to a 1-D float array and validate finiteness."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise ValueError(f"point must be 1-D, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point contains non-finite entries")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"point has dimension {p.shape[0]}, expected {dim}")
    return p


def _numeric_gradient(f: Callable[[Array], float], x: Array) -> Array:
    h = 1e-6 * (1.0 + np.linalg.norm(x))
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


@dataclass(frozen=True)
class Objective:
    """A C1 objective: value, gradient, and optional known optimum.

    The optimum metadata is consumed only by benchmarks and bound
    computations; solvers never read it.
    """

    dim: int
    f: Callable[[Array], float]
    grad: Optional[Callable[[Array], Array]] = None
    optimum_value: Optional[float] = None
    optimum_point: Optional[Array] = field(default=None)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.optimum_point is not None:
            xs = as_point(self.optimum_point, self.dim)
            object.__setattr__(self, "optimum_point", xs)
            if np.linalg.norm(self.gradient(xs)) > 1e-10:
                raise ValueError("optimum_point is not stationary")

    def value(self, x) -> float:
        return float(self.f(as_point(x, self.dim)))

    def gradient(self, x) -> Array:
        x = as_point(x, self.dim)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        return _numeric_gradient(self.f, x)


def quadratic_objective(diag) -> Objective:
    """Strongly convex quadratic f(x) = 1/2 x'Qx with diagonal Q.

    Raises :class:`InvalidSpectrumError` if any diagonal entry is
    nonpositive.
    """
    q = np.atleast_1d(np.asarray(diag, dtype=float))
    if q.ndim != 1 or q.size == 0:
        raise InvalidSpectrumError("diag must be a nonempty 1-D vector")
    if np.any(q <= 0.0) or not np.all(np.isfinite(q)):
        raise InvalidSpectrumError("diagonal entries must be positive and finite")
    q = q.copy()

    def f(x: Array) -> float:
        return 0.5 * float(np.dot(q * x, x))

    def grad(x: Array) -> Array:
        return q * x

    return Objective(
        dim=q.size,
        f=f,
        grad=grad,
        optimum_value=0.0,
        optimum_point=np.zeros(q.size),
    )


def sinewell_objective() -> Objective:
    """The 3-D benchmark f(x) = ||x||^2 + 4 sin^2(x3).

    Non-convex along the third axis wherever 2 + 8 cos(2 x3) < 0.
    """

    def f(x: Array) -> float:
        return float(np.dot(x, x) + 4.0 * np.sin(x[2]) ** 2)

    def grad(x: Array) -> Array:
        g = 2.0 * x.copy()
        g[2] += 4.0 * np.sin(2.0 * x[2])
        return g

    return Objective(
        dim=3, f=f, grad=grad, optimum_value=0.0, optimum_point=np.zeros(3)
    )


def figure1_objective() -> Objective:
    """The 1-D cubic 4(x-1)^2 - x^3 + 1.

    From the origin it is convex on [0, 4/3] and re-crosses its tangent
    line at x = 4, which makes it a convenient anchor for direction and
    segment detection tests.
    """

    def f(x: Array) -> float:
        t = x[0]
        return float(4.0 * (t - 1.0) ** 2 - t**3 + 1.0)

    def grad(x: Array) -> Array:
        t = x[0]
        return np.array([8.0 * (t - 1.0) - 3.0 * t**2])

    return Objective(dim=1, f=f, grad=grad)


def check_gradient(obj: Objective, x, h: float = 1e-5) -> float:
    """Max relative error between central differences and the analytic gradient."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    x = as_point(x, obj.dim)
    g = obj.gradient(x)
    err = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        fd = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
        err = max(err, abs(fd - g[i]) / (1.0 + abs(g[i])))
    return err
