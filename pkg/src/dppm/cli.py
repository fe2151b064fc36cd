"""Command-line front end: experiment reproduction and validation suites.

Subcommands::

    minimize           single solver run, trace CSV + JSON summary
    bench-quadratic    cyclic conjugate cycles vs the R-linear/superlinear bounds
    bench-nonconvex    strategy comparison on the sine-well benchmark
    bench-convex-rate  O(1/k) and accelerated O(1/k^2) gap bounds
    validate           seeded invariant suites

Every run is fully determined by its flags and seed; CSV output is
byte-identical across repeat invocations.  DPPM_SEED provides the default
seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from .dlc import DlcConfig
from .estimator import make_strategy
from .objectives import figure1_objective, quadratic_objective, sinewell_objective
from .quadratic import QuadraticModel, cyclic_dppm_run
from .solver import SolverConfig, Status, accelerated_dppm, dppm_minimize
from .suites import run_suite

_SUPPRESS = argparse.SUPPRESS


def _default_seed() -> int:
    return int(os.environ.get("DPPM_SEED", "0"))


def _load_config_file(path: str) -> dict:
    """Flat key=value file; keys use the flag spelling without leading dashes."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    merged = dict(defaults)
    ns = vars(args)
    cfg_path = ns.pop("config", None)
    if cfg_path:
        file_vals = _load_config_file(cfg_path)
        for key, raw in file_vals.items():
            if key in defaults and defaults[key] is not None:
                merged[key] = type(defaults[key])(raw) if not isinstance(
                    defaults[key], bool
                ) else raw.lower() in ("1", "true", "yes")
            else:
                merged[key] = raw
    for key, value in ns.items():
        merged[key] = value
    return merged


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _build_objective(opts: dict):
    name = opts.get("objective")
    if name == "sinewell":
        return sinewell_objective()
    if name == "figure1":
        return figure1_objective()
    if name == "quadratic":
        diag = opts.get("diag")
        if diag is None:
            raise SystemExit2("--diag is required for the quadratic objective")
        return quadratic_objective(_parse_vector(diag))
    raise SystemExit2(f"unknown objective {name!r}")


class SystemExit2(SystemExit):
    def __init__(self, msg):
        print(f"error: {msg}", file=sys.stderr)
        super().__init__(2)


def _write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _summary(status, iterations, final_f, final_grad, violations, wall) -> dict:
    return {
        "status": status.value if isinstance(status, Status) else status,
        "iterations": iterations,
        "final_f": final_f,
        "final_grad_norm": final_grad,
        "bound_violations": violations,
        "wall_time_s": round(wall, 6),
    }


# ---------------------------------------------------------------- minimize

_MINIMIZE_DEFAULTS = dict(
    objective=None, diag=None, init=None, strategy="gradient", beta=0.6,
    mu=1000.0, delta=None, tol=1e-6, max_iter=10_000, tau=2,
    convex_lambda=None, seed=None, out="trace.csv",
)


def cmd_minimize(args) -> int:
    opts = _merge(args, _MINIMIZE_DEFAULTS)
    seed = int(opts["seed"]) if opts["seed"] is not None else _default_seed()
    obj = _build_objective(opts)
    if opts["init"] is None:
        raise SystemExit2("--init is required")
    x0 = _parse_vector(str(opts["init"]))
    convex_lambda = opts["convex_lambda"]
    cfg = SolverConfig(
        max_iter=int(opts["max_iter"]),
        tol_grad=float(opts["tol"]),
        tau=int(opts["tau"]),
        convex_mode=convex_lambda is not None,
        lambda_const=float(convex_lambda) if convex_lambda is not None else 1.0,
        seed=seed,
    )
    delta = float(opts["delta"]) if opts["delta"] is not None else None
    strat = make_strategy(
        str(opts["strategy"]), beta=float(opts["beta"]),
        dlc_config=DlcConfig(
            delta=delta, mu=float(opts["mu"]), seed=seed, init_rule="perturbed",
            tol_p=1e-5, max_outer=100, restarts=2,
        ),
    )
    start = time.perf_counter()
    trace = dppm_minimize(obj, x0, strat, cfg)
    wall = time.perf_counter() - start
    rows = [
        (r.k, repr(r.f), repr(r.grad_norm), repr(r.w), repr(r.t), repr(r.v),
         r.direction_kind, repr(r.residual))
        for r in trace.records
    ]
    _write_csv(str(opts["out"]),
               ["k", "f", "grad_norm", "w", "t", "v", "direction", "residual"],
               rows)
    print(json.dumps(_summary(trace.status, len(trace.records),
                              trace.f_final, trace.grad_norm_final, 0, wall)))
    return 0 if trace.status is Status.CONVERGED else 1


# ---------------------------------------------------------- bench-quadratic

_QUAD_DEFAULTS = dict(
    dim=500, spectrum="30:300", lam=None, schedule=None, cycles=20,
    seed=None, out="quadratic.csv",
)


def make_spectrum(dim: int, lo: float, hi: float, seed: int) -> np.ndarray:
    """dim uniform draws on [0, 1] mapped affinely to [lo, hi]."""
    rng = np.random.default_rng(seed)
    return lo + rng.uniform(0.0, 1.0, dim) * (hi - lo)


def cmd_bench_quadratic(args) -> int:
    opts = _merge(args, _QUAD_DEFAULTS)
    seed = int(opts["seed"]) if opts["seed"] is not None else _default_seed()
    dim = int(opts["dim"])
    lo, hi = (float(v) for v in str(opts["spectrum"]).split(":"))
    if dim < 1 or lo <= 0.0:
        raise SystemExit2("need dim >= 1 and a positive spectrum floor")
    if (opts["lam"] is None) == (opts["schedule"] is None):
        raise SystemExit2("give exactly one of --lambda or --schedule")
    diag = make_spectrum(dim, lo, hi, seed)
    model = QuadraticModel(diag=diag)
    rng = np.random.default_rng(seed + 1)
    x0 = rng.standard_normal(dim)
    schedule = None
    lam = None
    if opts["schedule"] is not None:
        l0, c = (float(v) for v in str(opts["schedule"]).split(","))
        schedule = (l0, c)
    else:
        lam = float(opts["lam"])
    start = time.perf_counter()
    run = cyclic_dppm_run(model, x0, int(opts["cycles"]), lam=lam,
                          schedule=schedule)
    wall = time.perf_counter() - start
    rows = [
        (k, repr(float(r)), repr(float(b)))
        for k, (r, b) in enumerate(zip(run.ratios, run.bounds))
    ]
    _write_csv(str(opts["out"]), ["cycle", "q_ratio", "bound"], rows)
    excess = float(np.max(run.ratios - run.bounds))
    violations = int(np.sum(run.ratios > run.bounds + 1e-10))
    print(json.dumps({
        **_summary("Completed", int(opts["cycles"]) * dim,
                   0.5 * run.iterates_q_norm[-1] ** 2,
                   float("nan"), violations, wall),
        "max_ratio_minus_bound": excess,
        "m_realized": model.m,
    }))
    return 0 if violations == 0 else 1


# ---------------------------------------------------------- bench-nonconvex

_NONCONVEX_DEFAULTS = dict(
    strategies="gradient,momentum,dlc", init=None, random_box="10:40",
    repeats=3, tol=1e-6, max_iter=10_000, seed=None, out="nonconvex.csv",
)


def cmd_bench_nonconvex(args) -> int:
    opts = _merge(args, _NONCONVEX_DEFAULTS)
    seed = int(opts["seed"]) if opts["seed"] is not None else _default_seed()
    obj = sinewell_objective()
    strategies = str(opts["strategies"]).split(",")
    inits = []
    if opts["init"] is not None:
        inits.append(_parse_vector(str(opts["init"])))
    else:
        lo, hi = (float(v) for v in str(opts["random_box"]).split(":"))
        rng = np.random.default_rng(seed)
        for _ in range(int(opts["repeats"])):
            inits.append(rng.uniform(lo, hi, 3))
    rows = []
    all_ok = True
    start = time.perf_counter()
    iters_to_tol = {}
    for name in strategies:
        for run_idx, x0 in enumerate(inits):
            cfg = SolverConfig(
                max_iter=int(opts["max_iter"]), tol_grad=float(opts["tol"]),
                seed=seed + run_idx,
            )
            strat = make_strategy(name, dlc_config=DlcConfig(
                seed=seed + run_idx, init_rule="perturbed",
                tol_p=1e-5, max_outer=100, restarts=2))
            trace = dppm_minimize(obj, x0, strat, cfg)
            for rec in trace.records:
                rows.append((name, run_idx, rec.k,
                             repr(rec.f - (obj.optimum_value or 0.0))))
            iters_to_tol.setdefault(name, []).append(len(trace.records))
            if trace.status is not Status.CONVERGED:
                all_ok = False
    wall = time.perf_counter() - start
    _write_csv(str(opts["out"]), ["strategy", "run", "iter", "error"], rows)
    for name in strategies:
        print(json.dumps({
            "strategy": name,
            "iterations_to_tolerance": iters_to_tol.get(name, []),
            "median_iterations": float(np.median(iters_to_tol.get(name, [0]))),
            "wall_time_s": round(wall, 6),
        }))
    return 0 if all_ok else 1


# -------------------------------------------------------- bench-convex-rate

_RATE_DEFAULTS = dict(
    dim=50, lam=0.01, iters=1000, accelerate=False, spectrum="30:300",
    seed=None, out="rate.csv",
)


def cmd_bench_convex_rate(args) -> int:
    opts = _merge(args, _RATE_DEFAULTS)
    seed = int(opts["seed"]) if opts["seed"] is not None else _default_seed()
    dim = int(opts["dim"])
    lo, hi = (float(v) for v in str(opts["spectrum"]).split(":"))
    diag = make_spectrum(dim, lo, hi, seed)
    obj = quadratic_objective(diag)
    rng = np.random.default_rng(seed + 1)
    x0 = rng.standard_normal(dim)
    lam = float(opts["lam"])
    accelerate = bool(opts["accelerate"])
    cfg = SolverConfig(
        max_iter=int(opts["iters"]), tol_grad=0.0, convex_mode=True,
        lambda_const=lam, seed=seed,
    )
    strat = make_strategy("gradient")
    dist0_sq = float(np.dot(x0, x0))
    start = time.perf_counter()
    runner = accelerated_dppm if accelerate else dppm_minimize
    trace = runner(obj, x0, strat, cfg)
    wall = time.perf_counter() - start
    rows = []
    violations = 0
    worst = -np.inf
    for idx, rec in enumerate(trace.records):
        k = idx + 1
        gap = rec.f - (obj.optimum_value or 0.0)
        if accelerate:
            theta = 2.0 / (k + 1.0)
            bound = theta * theta / lam * dist0_sq
        else:
            bound = dist0_sq / (2.0 * lam * k)
        rows.append((k, repr(gap), repr(bound)))
        worst = max(worst, gap - bound)
        if gap > bound:
            violations += 1
    _write_csv(str(opts["out"]), ["k", "f_gap", "bound"], rows)
    print(json.dumps({
        **_summary("Completed", len(trace.records), trace.f_final,
                   trace.grad_norm_final, violations, wall),
        "max_gap_minus_bound": worst,
    }))
    return 0 if violations == 0 else 1


# ----------------------------------------------------------------- validate

_VALIDATE_DEFAULTS = dict(suite="all", seed=None)


def cmd_validate(args) -> int:
    opts = _merge(args, _VALIDATE_DEFAULTS)
    seed = int(opts["seed"]) if opts["seed"] is not None else _default_seed()
    try:
        results = run_suite(str(opts["suite"]), seed)
    except KeyError:
        raise SystemExit2(f"unknown suite {opts['suite']!r}")
    total = 0
    for name, violations in results.items():
        print(f"{name}: {violations} violations")
        total += violations
    print(json.dumps({"suites": results, "total_violations": total}))
    return 0 if total == 0 else 1


# -------------------------------------------------------------------- main


def _add_common(p):
    p.add_argument("--config", default=None,
                   help="flat key=value file mirroring the flags")
    p.add_argument("--seed", type=int, default=_SUPPRESS)
    p.add_argument("--out", default=_SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dppm", description="Directional proximal point method benchmarks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimize", help="single solver run")
    p.add_argument("--objective", required=True,
                   choices=["sinewell", "quadratic", "figure1"])
    p.add_argument("--diag", default=_SUPPRESS)
    p.add_argument("--init", default=_SUPPRESS)
    p.add_argument("--strategy", default=_SUPPRESS,
                   choices=["gradient", "momentum", "dlc"])
    p.add_argument("--beta", type=float, default=_SUPPRESS)
    p.add_argument("--mu", type=float, default=_SUPPRESS)
    p.add_argument("--delta", type=float, default=_SUPPRESS)
    p.add_argument("--tol", type=float, default=_SUPPRESS)
    p.add_argument("--max-iter", type=int, default=_SUPPRESS, dest="max_iter")
    p.add_argument("--tau", type=int, default=_SUPPRESS)
    p.add_argument("--convex-lambda", type=float, default=_SUPPRESS,
                   dest="convex_lambda")
    _add_common(p)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("bench-quadratic", help="cyclic conjugate rate bounds")
    p.add_argument("--dim", type=int, default=_SUPPRESS)
    p.add_argument("--spectrum", default=_SUPPRESS)
    p.add_argument("--lambda", type=float, default=_SUPPRESS, dest="lam")
    p.add_argument("--schedule", default=_SUPPRESS,
                   help="lambda0,c geometric per-cycle schedule")
    p.add_argument("--cycles", type=int, default=_SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_bench_quadratic)

    p = sub.add_parser("bench-nonconvex", help="strategy comparison")
    p.add_argument("--strategies", default=_SUPPRESS)
    p.add_argument("--init", default=_SUPPRESS)
    p.add_argument("--random-box", default=_SUPPRESS, dest="random_box")
    p.add_argument("--repeats", type=int, default=_SUPPRESS)
    p.add_argument("--tol", type=float, default=_SUPPRESS)
    p.add_argument("--max-iter", type=int, default=_SUPPRESS, dest="max_iter")
    _add_common(p)
    p.set_defaults(func=cmd_bench_nonconvex)

    p = sub.add_parser("bench-convex-rate", help="O(1/k) and accelerated bounds")
    p.add_argument("--dim", type=int, default=_SUPPRESS)
    p.add_argument("--lambda", type=float, default=_SUPPRESS, dest="lam")
    p.add_argument("--iters", type=int, default=_SUPPRESS)
    p.add_argument("--spectrum", default=_SUPPRESS)
    p.add_argument("--accelerate", action="store_true", default=_SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_bench_convex_rate)

    p = sub.add_parser("validate", help="run invariant suites")
    p.add_argument("--suite", default=_SUPPRESS,
                   choices=["lemma8", "prox", "dlc", "descent", "fejer", "all"])
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=_SUPPRESS)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = args.func
    del args.func
    del args.command
    try:
        return func(args)
    except SystemExit2:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
