"""Directional proximal point method for unconstrained smooth minimization."""

from .dlc import (
    DlcConfig,
    DlcResult,
    DlcSubproblem,
    DualPoint,
    dual_value,
    find_dlc_direction,
    g_values,
    linearized_constraints,
    maximize_dual,
    primal_recover,
)
from .errors import (
    DegenerateSegmentError,
    DppmError,
    EvaluationError,
    InvalidSpectrumError,
    NonDescentError,
    ScheduleError,
    SingularUpdateError,
    StationaryPointError,
    UnboundedDualError,
)
from .estimator import DPPMSolver, make_strategy
from .linesearch import (
    ProxStep,
    detect_convex_segment,
    golden_section_min,
    prox_step,
    select_t,
)
from .objectives import (
    Objective,
    check_gradient,
    figure1_objective,
    quadratic_objective,
    sinewell_objective,
)
from .quadratic import (
    QuadraticModel,
    cyclic_conjugate_direction,
    cyclic_dppm_run,
    eigen_check,
    q_norm,
    rank_one_inverse_apply,
    rlinear_bound,
    superlinear_schedule,
)
from .solver import (
    CyclicConjugateStrategy,
    DlcStrategy,
    GradientStrategy,
    MomentumStrategy,
    SolverConfig,
    Status,
    Trace,
    accelerated_dppm,
    check_fejer,
    dppm_minimize,
    gradient_direction,
    momentum_direction,
    perturb_direction,
)

__version__ = "0.1.0"
