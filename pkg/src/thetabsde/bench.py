"""Convergence sweeps, rate fitting and CSV output."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from ._validation import check_m_list, check_problem
from .errors import DegenerateInput, IoFailure, ThetaBSDEError
from .estimator import ThetaSchemeSolver
from .scheme import ThetaParams

TABLE_M = (35, 55, 75, 95, 115)
CSV_HEADER = "M,dt,err_y,err_z,wall_time_s"

# Theta sets per reference problem, in table order, with published rates (cr_y, cr_z).
TABLE_PRESETS = {
    "example1": [
        ((0.5, 0.5, 0.5), (1.988, 2.000)),
        ((1.0, 0.0, 0.5), (0.998, 0.980)),
        ((0.0, 0.5, 0.5), (0.999, 1.025)),
        ((0.0, 0.25, 0.5), (1.030, 0.982)),
        ((1.0, 0.5, 0.75), (0.994, 0.928)),
        ((0.5, 0.5, 0.25), (0.972, 0.989)),
    ],
    "example2": [
        ((0.5, 0.5, 0.5), (2.040, 2.010)),
        ((1.0, 1.0, 1.0), (0.967, 0.985)),
        ((0.0, 0.5, 0.5), (0.992, 0.951)),
        ((0.0, 0.25, 0.5), (1.006, 1.025)),
        ((1.0, 0.5, 0.75), (0.983, 0.951)),
        ((1.0, 0.0, 0.5), (0.974, 0.974)),
    ],
}


@dataclass(frozen=True)
class ErrorReport:
    M: int
    dt: float
    err_y: float
    err_z: float
    wall_time: float


@dataclass
class ConvergenceReport:
    params: ThetaParams
    rows: list = field(default_factory=list)

    @property
    def has_rates(self) -> bool:
        return (len({r.dt for r in self.rows}) >= 2
                and all(r.err_y > 0 and r.err_z > 0 for r in self.rows))

    @property
    def cr_y(self) -> float:
        return estimate_rate([(r.dt, r.err_y) for r in self.rows])

    @property
    def cr_z(self) -> float:
        return estimate_rate([(r.dt, r.err_z) for r in self.rows])


@dataclass(frozen=True)
class BenchConfig:
    gh_order: int = 8
    gh_order_inner: int | None = None
    gamma: float = 10.0
    n_jobs: int = 1
    workers: int = 1


def estimate_rate(errors) -> float:
    """Least-squares slope of ``log(err)`` against ``log(dt)``."""
    pts = list(errors)
    if len(pts) < 2:
        raise DegenerateInput(f"need at least 2 (dt, err) points, got {len(pts)}")
    dt = np.array([p[0] for p in pts], dtype=float)
    err = np.array([p[1] for p in pts], dtype=float)
    if np.any(dt <= 0) or np.any(err <= 0) or not np.all(np.isfinite(err)):
        raise DegenerateInput("time steps and errors must be finite and strictly positive")
    if np.ptp(dt) == 0:
        raise DegenerateInput("need at least two distinct time steps")
    lx = np.log(dt)
    ly = np.log(err)
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


def solve_once(problem, params: ThetaParams, M: int, config: BenchConfig = BenchConfig()):
    est = ThetaSchemeSolver(*params.as_tuple(), n_steps=M, gh_order=config.gh_order,
                            gh_order_inner=config.gh_order_inner, gamma=config.gamma,
                            n_jobs=config.n_jobs)
    start = time.perf_counter()
    est.fit(problem)
    return est, time.perf_counter() - start


def run_convergence(problem, params: ThetaParams, M_list=TABLE_M, config: BenchConfig = BenchConfig()):
    """One independent solve per ``M``; rows come back in ``M_list`` order."""
    problem = check_problem(problem)
    M_list = check_m_list(M_list)

    def one(M):
        try:
            est, wall = solve_once(problem, params, M, config)
            err_y, err_z = est.errors()
        except ThetaBSDEError as exc:
            exc.args = (f"M={M}: {exc}",)
            exc.M = M
            raise
        return ErrorReport(M=M, dt=est.grid_.dt, err_y=err_y, err_z=err_z, wall_time=wall)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(one, M_list))
    else:
        rows = [one(M) for M in M_list]
    return ConvergenceReport(params=params, rows=rows)


def _fmt(v) -> str:
    return f"{v:.5e}"


def format_csv(report: ConvergenceReport) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(f"{r.M},{_fmt(r.dt)},{_fmt(r.err_y)},{_fmt(r.err_z)},{_fmt(r.wall_time)}")
    if report.rows:
        cr_y, cr_z = (report.cr_y, report.cr_z) if report.has_rates else (math.nan, math.nan)
        lines.append(f"# cr_y={cr_y:.6g}")
        lines.append(f"# cr_z={cr_z:.6g}")
    return "\n".join(lines) + "\n"


def emit_csv(report: ConvergenceReport, path) -> None:
    _write(path, format_csv(report))


def emit_plot_data(report: ConvergenceReport, path, component: str = "y") -> None:
    """Two whitespace-separated columns: ``log(dt)`` and ``log(err)``."""
    attr = {"y": "err_y", "z": "err_z"}[component]
    lines = [f"# log_dt log_{attr}"]
    for r in report.rows:
        err = getattr(r, attr)
        if err > 0:
            lines.append(f"{math.log(r.dt):.8e} {math.log(err):.8e}")
    _write(path, "\n".join(lines) + "\n")


def _write(path, text):
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
