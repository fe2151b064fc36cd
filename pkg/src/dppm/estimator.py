"""Scikit-learn style front end for the solver.

``DPPMSolver`` exposes the loop through the familiar get_params /
set_params / fit surface so it can be configured and cloned like any other
estimator; the fitted attributes carry the solution and trace.
"""

from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator

from .dlc import DlcConfig
from .objectives import Objective, as_point
from .solver import (
    CyclicConjugateStrategy,
    DlcStrategy,
    GradientStrategy,
    MomentumStrategy,
    SolverConfig,
    Status,
    accelerated_dppm,
    dppm_minimize,
)


def make_strategy(name: str, beta: float = 0.6,
                  dlc_config: Optional[DlcConfig] = None,
                  basis=None, q_diag=None):
    """Build a direction strategy from its CLI name."""
    if name == "gradient":
        return GradientStrategy()
    if name == "momentum":
        return MomentumStrategy(beta=beta)
    if name == "dlc":
        return DlcStrategy(config=dlc_config)
    if name == "cyclic":
        if basis is None or q_diag is None:
            raise ValueError("cyclic strategy needs basis and q_diag")
        return CyclicConjugateStrategy(basis, q_diag)
    raise ValueError(f"unknown strategy {name!r}")


class DPPMSolver(BaseEstimator):
    """Directional proximal point minimizer with a fit() interface.

    Parameters mirror the solver configuration; after ``fit`` the solution
    is available as ``x_``, ``fun_``, ``n_iter_``, ``status_``, ``trace_``.
    """

    def __init__(self, strategy="gradient", beta=0.6, max_iter=10_000,
                 tol_grad=1e-6, tau=2, convex_mode=False, lambda_const=1.0,
                 lambda_schedule=None, perturb_scale=0.01, seed=0,
                 accelerate=False, mu=1000.0, delta=None):
        self.strategy = strategy
        self.beta = beta
        self.max_iter = max_iter
        self.tol_grad = tol_grad
        self.tau = tau
        self.convex_mode = convex_mode
        self.lambda_const = lambda_const
        self.lambda_schedule = lambda_schedule
        self.perturb_scale = perturb_scale
        self.seed = seed
        self.accelerate = accelerate
        self.mu = mu
        self.delta = delta

    def _config(self) -> SolverConfig:
        return SolverConfig(
            max_iter=self.max_iter,
            tol_grad=self.tol_grad,
            tau=self.tau,
            convex_mode=self.convex_mode,
            lambda_const=self.lambda_const,
            lambda_schedule=self.lambda_schedule,
            perturb_scale=self.perturb_scale,
            seed=self.seed,
        )

    def fit(self, objective: Objective, x0):
        x0 = as_point(x0, objective.dim)
        dlc_cfg = DlcConfig(
            delta=self.delta, mu=self.mu, seed=self.seed, init_rule="perturbed",
            tol_p=1e-5, max_outer=100, restarts=2,
        )
        strat = make_strategy(self.strategy, beta=self.beta, dlc_config=dlc_cfg)
        run = accelerated_dppm if self.accelerate else dppm_minimize
        trace = run(objective, x0, strat, self._config())
        self.trace_ = trace
        self.x_ = trace.x_final
        self.fun_ = trace.f_final
        self.grad_norm_ = trace.grad_norm_final
        self.n_iter_ = len(trace.records)
        self.status_ = trace.status
        return self

    def predict(self, objective: Objective):
        """Value of the fitted minimizer under ``objective``."""
        if not hasattr(self, "x_"):
            raise RuntimeError("call fit first")
        return objective.value(self.x_)

    @property
    def converged_(self) -> bool:
        return self.status_ is Status.CONVERGED
