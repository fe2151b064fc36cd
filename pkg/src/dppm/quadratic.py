"""Closed-form machinery for strongly convex quadratics.

For f(x) = 1/2 x'Qx the proximal update along a unit direction p is the
application of a rank-one-corrected inverse, so whole runs can be carried
out without any line search.  This module also provides the cyclic
conjugate-direction driver and the R-linear / R-superlinear rate bounds it
is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import ScheduleError, SingularUpdateError
from .objectives import Array

_SING_TOL = 1e-12


def _apply_q(Q, x: Array) -> Array:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        return Q * x
    return Q @ x


@dataclass(frozen=True)
class QuadraticModel:
    """Diagonal (or dense, in oracle tests) Q with its conjugate basis."""

    diag: Array
    basis: List[Array] = field(default_factory=list)

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.diag, dtype=float))
        if np.any(q <= 0.0):
            raise ValueError("Q must be positive definite")
        object.__setattr__(self, "diag", q)
        basis = self.basis or [np.eye(q.size)[i] for i in range(q.size)]
        basis = [np.asarray(b, dtype=float) for b in basis]
        for i, bi in enumerate(basis):
            if abs(np.linalg.norm(bi) - 1.0) > 1e-10:
                raise ValueError("basis vectors must be unit norm")
            for bj in basis[i + 1:]:
                if abs(np.dot(bi, self.diag * bj)) > 1e-10:
                    raise ValueError("basis vectors must be Q-conjugate")
        object.__setattr__(self, "basis", basis)

    @property
    def m(self) -> float:
        return float(self.diag.min())


def rank_one_inverse_apply(Q, p_bar, t: float, x) -> Array:
    """[I + t p p'Q]^{-1} x via the rank-one correction formula."""
    p = np.asarray(p_bar, dtype=float)
    x = np.asarray(x, dtype=float)
    qp = _apply_q(Q, p)
    den = 1.0 + t * float(np.dot(p, qp))
    if abs(den) <= _SING_TOL:
        raise SingularUpdateError("1 + t p'Qp is numerically zero")
    qx = _apply_q(Q, x)
    return x - (t / den) * p * float(np.dot(p, qx))


def eigen_check(Q, p_bar, t: float) -> float:
    """Verify p is an eigenvector of the inverse and return its eigenvalue."""
    p = np.asarray(p_bar, dtype=float)
    qp = _apply_q(Q, p)
    den = 1.0 + t * float(np.dot(p, qp))
    if abs(den) <= _SING_TOL:
        raise SingularUpdateError("1 + t p'Qp is numerically zero")
    eig = 1.0 / den
    residual = np.linalg.norm(rank_one_inverse_apply(Q, p, t, p) - eig * p)
    if residual > 1e-12 * max(1.0, abs(eig)):
        raise AssertionError(f"eigen residual {residual:g} too large")
    return eig


def cyclic_conjugate_direction(model: QuadraticModel, x, k: int):
    """Direction at cycle position k mod n with the descent sign, or None.

    Returns None (skip) when the current conjugate vector is orthogonal to
    the gradient; the iterate stays put for that index.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    g = model.basis[k % len(model.basis)]
    qx = model.diag * np.asarray(x, dtype=float)
    s = float(np.dot(g, qx))
    # Relative threshold: an absolute cutoff would freeze runs whose
    # iterates contract far below unit scale while still well above
    # the float range.
    if abs(s) <= 1e-14 * float(np.max(np.abs(qx), initial=0.0)):
        return None
    return -g if s > 0.0 else g


def q_norm(Q, x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.dot(x, _apply_q(Q, x))))


def rlinear_bound(lam: float, m: float, n: int):
    """Per-cycle contraction 1/(1 + lam m) and the per-iteration rate."""
    if lam <= 0.0 or m <= 0.0 or n < 1:
        raise ValueError("need lam > 0, m > 0, n >= 1")
    per_cycle = 1.0 / (1.0 + lam * m)
    return per_cycle, per_cycle ** (1.0 / n)


def superlinear_schedule(lambda0: float, c: float, cycle_k: int) -> float:
    """Geometric per-cycle step-size schedule lambda0 * c^k, c > 1."""
    if c <= 1.0:
        raise ScheduleError("growth factor c must exceed 1")
    if lambda0 <= 0.0:
        raise ValueError("lambda0 must be positive")
    return lambda0 * c**cycle_k


@dataclass(frozen=True)
class CyclicRun:
    iterates_q_norm: Array           # Q-norm at every cycle boundary
    ratios: Array                    # per-cycle Q-norm ratios
    bounds: Array                    # matching theoretical bounds
    x_final: Array


def cyclic_dppm_run(
    model: QuadraticModel,
    x0,
    cycles: int,
    lam: Optional[float] = None,
    schedule: Optional[tuple] = None,
) -> CyclicRun:
    """Run full conjugate cycles with the closed-form update.

    Either a constant lam or a geometric (lambda0, c) schedule must be
    given; the bound per cycle k is 1/(1 + lam_k m).
    """
    if (lam is None) == (schedule is None):
        raise ValueError("give exactly one of lam or schedule")
    x = np.asarray(x0, dtype=float).copy()
    n = len(model.basis)
    norms = [q_norm(model.diag, x)]
    bounds = []
    for cycle in range(cycles):
        if schedule is not None:
            lam_k = superlinear_schedule(schedule[0], schedule[1], cycle)
        else:
            lam_k = lam
        for i in range(n):
            d = cyclic_conjugate_direction(model, x, cycle * n + i)
            if d is None:
                continue
            x = rank_one_inverse_apply(model.diag, d, lam_k, x)
        norms.append(q_norm(model.diag, x))
        bounds.append(1.0 / (1.0 + lam_k * model.m))
    norms = np.array(norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = norms[1:] / norms[:-1]
    return CyclicRun(
        iterates_q_norm=norms,
        ratios=ratios,
        bounds=np.array(bounds),
        x_final=x,
    )
