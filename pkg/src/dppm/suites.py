"""Seeded invariant suites behind the ``validate`` CLI subcommand.

Each suite returns the number of violations it found; zero means pass.
The suites deliberately check implementations against independent
computations (dense inverses, grid searches, direct residuals).
"""

from __future__ import annotations

import numpy as np

from . import dlc as dlc_mod
from .linesearch import golden_section_min, prox_step
from .objectives import quadratic_objective, sinewell_objective
from .quadratic import QuadraticModel, eigen_check, rank_one_inverse_apply
from .solver import (
    GradientStrategy,
    SolverConfig,
    check_fejer,
    dppm_minimize,
)


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def suite_lemma8(seed: int = 0, trials: int = 100) -> int:
    """Rank-one inverse formula vs dense inverse; eigen residuals."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(trials):
        n = 10
        Q = _random_spd(rng, n)
        p = rng.standard_normal(n)
        p /= np.linalg.norm(p)
        x = rng.standard_normal(n)
        for t in (0.1, 1.0, 10.0):
            dense = np.linalg.solve(np.eye(n) + t * np.outer(p, p @ Q), x)
            ours = rank_one_inverse_apply(Q, p, t, x)
            if np.max(np.abs(dense - ours)) > 1e-10:
                violations += 1
            try:
                eigen_check(Q, p, t)
            except AssertionError:
                violations += 1
    return violations


def suite_prox(seed: int = 0, trials: int = 50) -> int:
    """Golden-section step vs closed-form quadratic minimizer and Eq.-level
    stationarity residuals."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(trials):
        n = int(rng.integers(2, 8))
        diag = rng.uniform(0.5, 5.0, n)
        obj = quadratic_objective(diag)
        x = rng.uniform(-2.0, 2.0, n)
        if np.linalg.norm(obj.gradient(x)) < 1e-8:
            continue
        g = obj.gradient(x)
        d = -g / np.linalg.norm(g)
        step = prox_step(obj, x, d)
        # Closed form for quadratics: w* = -t p'Qx / (1 + t p'Qp).
        t = step.t
        pqp = float(np.dot(d, diag * d))
        w_exact = -t * float(np.dot(d, diag * x)) / (1.0 + t * pqp)
        if w_exact <= step.v and abs(step.w_star - w_exact) > 1e-6 * (1 + w_exact):
            violations += 1
        if step.interior and abs(step.residual) > 1e-6 * (
            1.0 + abs(float(np.dot(d, g)))
        ):
            violations += 1
        if step.phi_next > obj.value(x):
            violations += 1
    return violations


def suite_dlc(seed: int = 0, trials: int = 200) -> int:
    """Active-set dual maximizer vs a refined grid search."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(trials):
        n = 5
        diag = rng.uniform(0.5, 4.0, n)
        obj = quadratic_objective(diag)
        x = rng.uniform(-2.0, 2.0, n)
        p0 = rng.standard_normal(n)
        sub = dlc_mod.DlcSubproblem(
            x=x, fx=obj.value(x), gx=obj.gradient(x),
            delta=1e-4, mu=float(rng.uniform(1.0, 50.0)), p0=p0,
        )
        lin = dlc_mod.linearized_constraints(sub, obj)
        try:
            lam = dlc_mod.maximize_dual(sub, lin)
        except dlc_mod.UnboundedDualError:
            continue
        d_star = dlc_mod.dual_value(lam, sub, lin)
        grid_best = _grid_max_dual(sub, lin)
        if d_star < grid_best - 1e-4:
            violations += 1
        if lam.lambda1 < 0.0 or lam.lambda2 < 0.0:
            violations += 1
    return violations


def _grid_max_dual(sub, lin, hi: float = 50.0) -> float:
    """Coarse-to-fine grid search over [0, hi]^2 for the dual maximum."""
    b, A, const = dlc_mod._dual_coefficients(sub, lin)

    def d_on(l1, l2):
        return (
            b[0] * l1 + b[1] * l2
            - 0.5 * (A[0, 0] * l1**2 + 2 * A[0, 1] * l1 * l2 + A[1, 1] * l2**2)
            + const
        )

    coarse = np.linspace(0.0, hi, 201)
    L1, L2 = np.meshgrid(coarse, coarse, indexing="ij")
    vals = d_on(L1, L2)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    c1, c2 = coarse[i], coarse[j]
    span = hi / 200.0
    f1 = np.clip(np.linspace(c1 - span, c1 + span, 201), 0.0, hi)
    f2 = np.clip(np.linspace(c2 - span, c2 + span, 201), 0.0, hi)
    F1, F2 = np.meshgrid(f1, f2, indexing="ij")
    return float(np.max(d_on(F1, F2)))


def suite_descent(seed: int = 0) -> int:
    """Descent inequality along full solver runs on the benchmarks."""
    rng = np.random.default_rng(seed)
    violations = 0
    runs = [
        (sinewell_objective(), np.array([0.0, 0.0, 30.0])),
        (sinewell_objective(), rng.uniform(10.0, 40.0, 3)),
        (quadratic_objective(rng.uniform(1.0, 5.0, 10)), rng.uniform(-2, 2, 10)),
    ]
    for obj, x0 in runs:
        trace = dppm_minimize(
            obj, x0, GradientStrategy(), SolverConfig(seed=seed)
        )
        f_prev = obj.value(x0)
        x_prev = np.asarray(x0, dtype=float)
        for rec in trace.records:
            if rec.w == 0.0:
                continue
            d = (rec.x - x_prev) / rec.w
            slope_next = float(np.dot(obj.gradient(rec.x), d))
            # Relative slack: the probe resolves the segment to one cell.
            if rec.f > f_prev - rec.t * slope_next**2 + 1e-6 * (1.0 + abs(f_prev)):
                violations += 1
            f_prev = rec.f
            x_prev = rec.x
    return violations


def suite_fejer(seed: int = 0) -> int:
    """Fejer monotonicity with k0 = 0 on convex benchmark runs."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(5):
        n = int(rng.integers(2, 20))
        obj = quadratic_objective(rng.uniform(1.0, 10.0, n))
        x0 = rng.uniform(-3.0, 3.0, n)
        trace = dppm_minimize(
            obj, x0, GradientStrategy(),
            SolverConfig(convex_mode=True, lambda_const=0.1, seed=seed),
        )
        res = check_fejer(trace, obj.optimum_point)
        if not res.passed or res.k0 != 0:
            violations += 1
    return violations


SUITES = {
    "lemma8": suite_lemma8,
    "prox": suite_prox,
    "dlc": suite_dlc,
    "descent": suite_descent,
    "fejer": suite_fejer,
}


def run_suite(name: str, seed: int = 0) -> dict:
    """Run one named suite (or 'all'); returns {suite: violations}."""
    if name == "all":
        return {n: fn(seed) for n, fn in SUITES.items()}
    if name not in SUITES:
        raise KeyError(name)
    return {name: SUITES[name](seed)}
