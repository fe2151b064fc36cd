"""Figure regeneration from dppm benchmark CSV files.

Three figure kinds are supported:

    error_curves   log-scale error vs iteration, one curve per strategy,
                   from a bench-nonconvex CSV (strategy,run,iter,error)
    ratio_bounds   per-cycle Q-norm ratio scatter with horizontal bound
                   lines, from a bench-quadratic CSV (cycle,q_ratio,bound)
    curvature      the analytic directional second derivative
                   2 + 8 cos(2 x3) with its negative windows shaded

The scripts are read-only over their inputs and deterministic: SVG output
carries no timestamp and uses a fixed hash salt, so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "dppm-figures"

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("error_curves", "ratio_bounds", "curvature")

_ERROR_HEADER = ["strategy", "run", "iter", "error"]
_RATIO_HEADER = ["cycle", "q_ratio", "bound"]

# Bound-line palette for schedule runs, in cycle order.
_BOUND_COLORS = ("green", "gold", "red")


class SchemaError(ValueError):
    """CSV file missing, empty, or with an unexpected header/row shape."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV, kind, and output path.

    ``csv_path`` is unused for the analytic curvature figure.  ``lo``/``hi``
    bound the curvature x3 range; ``raster`` switches the output from SVG
    to PNG.
    """

    kind: str
    out_path: str
    csv_path: Optional[str] = None
    lo: float = -2.0 * math.pi
    hi: float = 2.0 * math.pi
    raster: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.kind != "curvature" and self.csv_path is None:
            raise ValueError(f"{self.kind} requires a CSV path")
        if self.hi <= self.lo:
            raise ValueError("need hi > lo")


def _read_csv(path: str, header: List[str]) -> List[List[str]]:
    p = Path(path)
    if not p.is_file():
        raise SchemaError(f"no such CSV file: {path}")
    with open(p, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != header:
        raise SchemaError(
            f"{path}: expected header {','.join(header)}, "
            f"got {','.join(rows[0]) if rows else '<empty file>'}"
        )
    body = [r for r in rows[1:] if r]
    if not body:
        raise SchemaError(f"{path}: no data rows")
    for r in body:
        if len(r) != len(header):
            raise SchemaError(f"{path}: row width {len(r)} != {len(header)}")
    return body


def plot_error_curves(spec: FigureSpec):
    """One labeled log-scale curve per strategy; runs share the color."""
    body = _read_csv(spec.csv_path, _ERROR_HEADER)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    strategies = []
    for row in body:
        if row[0] not in strategies:
            strategies.append(row[0])
    colors = {s: f"C{i}" for i, s in enumerate(strategies)}
    for strat in strategies:
        labeled = False
        runs = sorted({int(r[1]) for r in body if r[0] == strat})
        for run in runs:
            pts = [(int(r[2]), float(r[3])) for r in body
                   if r[0] == strat and int(r[1]) == run]
            pts.sort()
            ks = np.array([p[0] for p in pts])
            errs = np.array([p[1] for p in pts])
            # Converged tails can hit exactly zero; drop them from the log plot.
            mask = errs > 0.0
            ax.semilogy(ks[mask], errs[mask], color=colors[strat],
                        label=None if labeled else strat)
            labeled = True
    ax.set_xlabel("iteration")
    ax.set_ylabel("error")
    ax.legend()
    fig.tight_layout()
    return fig


def plot_ratio_bounds(spec: FigureSpec):
    """Blue ratio dots per cycle under horizontal bound lines.

    A constant-lambda run has one bound line; a schedule run has one line
    per distinct bound value (green/gold/red in cycle order).  Ratios above
    their bound are still rendered but flagged with a printed warning.
    """
    body = _read_csv(spec.csv_path, _RATIO_HEADER)
    cycles = np.array([int(r[0]) for r in body])
    ratios = np.array([float(r[1]) for r in body])
    bounds = np.array([float(r[2]) for r in body])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.scatter(cycles, ratios, color="tab:blue", zorder=3, label="ratio")
    levels = []
    for b in bounds:
        if not any(abs(b - lv) <= 1e-15 for lv in levels):
            levels.append(float(b))
    for i, lv in enumerate(levels):
        color = _BOUND_COLORS[i % len(_BOUND_COLORS)] if len(levels) > 1 else "red"
        ax.axhline(lv, color=color, label=f"bound {lv:.3g}")
    for k, r, b in zip(cycles, ratios, bounds):
        if r > b + 1e-12:
            print(f"warning: cycle {k} ratio {r:.6g} exceeds bound {b:.6g}")
    ax.set_xlabel("cycle")
    ax.set_ylabel("Q-norm ratio")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    fig.tight_layout()
    return fig


def curvature_negative_windows(lo: float, hi: float) -> List[Tuple[float, float]]:
    """Open intervals of x3 in [lo, hi] where 2 + 8 cos(2 x3) < 0.

    The curvature is negative exactly where cos(2 x3) < -1/4, i.e. on
    (a + pi n, pi - a + pi n) with a = arccos(-1/4)/2.
    """
    a = math.acos(-0.25) / 2.0
    out = []
    n = math.floor((lo - (math.pi - a)) / math.pi)
    while a + n * math.pi < hi:
        start = a + n * math.pi
        end = math.pi - a + n * math.pi
        clipped = (max(start, lo), min(end, hi))
        if clipped[1] > clipped[0]:
            out.append(clipped)
        n += 1
    return out


def plot_curvature(spec: FigureSpec):
    """Directional curvature 2 + 8 cos(2 x3) with negative windows shaded."""
    x = np.linspace(spec.lo, spec.hi, 2001)
    y = 2.0 + 8.0 * np.cos(2.0 * x)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, y, color="tab:blue")
    ax.axhline(0.0, color="black", linewidth=0.8)
    for start, end in curvature_negative_windows(spec.lo, spec.hi):
        ax.axvspan(start, end, color="tab:red", alpha=0.2)
    ax.set_xlabel("x3")
    ax.set_ylabel("second derivative")
    fig.tight_layout()
    return fig


_PLOTTERS = {
    "error_curves": plot_error_curves,
    "ratio_bounds": plot_ratio_bounds,
    "curvature": plot_curvature,
}


def save_figure(fig, out_path: str, raster: bool = False) -> None:
    """Write SVG (default) or PNG; SVG drops the date for byte-stable reruns."""
    if raster:
        fig.savefig(out_path, format="png", dpi=150)
    else:
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render(spec: FigureSpec) -> str:
    fig = _PLOTTERS[spec.kind](spec)
    save_figure(fig, spec.out_path, raster=spec.raster)
    return spec.out_path
