"""Explicit theta-scheme backward iteration.

At each level ``n = N-1, ..., 0`` and each space node the unknowns are
computed in the order ``Z^n -> Ybar^n -> Y^n``; level ``n`` only reads
levels ``>= n+1`` plus those same-level transients.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import LevelNotPopulated, NonFiniteValue, ValidationError
from .grid import DelaySchedule, TimeGrid, build_delay_schedule
from .quadrature import QuadratureRule, expect_generator_current, generator_next_moments, next_moments
from .spatial import SpaceGrid, SplineField


@dataclass(frozen=True)
class ThetaParams:
    theta1: float = 0.5
    theta2: float = 0.5
    theta3: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.theta1 <= 1.0 and 0.0 <= self.theta2 <= 1.0):
            raise ValidationError(f"theta1, theta2 must lie in [0, 1], got {self.theta1}, {self.theta2}")
        if not 0.0 < self.theta3 <= 1.0:
            raise ValidationError(f"theta3 must lie in (0, 1], got {self.theta3}")

    def scheme_order(self) -> int:
        return 2 if self.theta1 == self.theta2 == self.theta3 == 0.5 else 1

    def as_tuple(self):
        return (self.theta1, self.theta2, self.theta3)


@dataclass(frozen=True)
class Rules:
    outer: QuadratureRule
    inner: QuadratureRule


class SolutionField:
    """Y and Z spline fields per time level on a shared space grid.

    If ``access_log`` is a list, every level read is appended to it.
    """

    def __init__(self, sgrid: SpaceGrid, n_levels: int, access_log=None):
        self.sgrid = sgrid
        self.n_levels = n_levels
        self._y: list = [None] * n_levels
        self._z: list = [None] * n_levels
        self.access_log = access_log

    def populated(self, n: int) -> bool:
        return 0 <= n < self.n_levels and self._y[n] is not None

    def set_level(self, n: int, y_values, z_values):
        if self.populated(n):
            raise ValidationError(f"level {n} is already populated")
        if n + 1 < self.n_levels and not self.populated(n + 1):
            raise ValidationError(f"level {n} written before level {n + 1}")
        self._y[n] = SplineField(self.sgrid, y_values)
        self._z[n] = SplineField(self.sgrid, z_values)

    def level(self, n: int) -> tuple[SplineField, SplineField]:
        if not self.populated(n):
            raise LevelNotPopulated(f"time level {n} has no data")
        if self.access_log is not None:
            self.access_log.append(n)
        return self._y[n], self._z[n]

    def y_values(self, n: int) -> np.ndarray:
        return self.level(n)[0].values

    def z_values(self, n: int) -> np.ndarray:
        return self.level(n)[1].values

    def clamp_count(self) -> int:
        return sum(f.clamp_count for f in self._y + self._z if f is not None)

    def value_at(self, n: int, x: float) -> tuple[float, float]:
        y, z = self.level(n)
        return float(y(x)), float(z(x))


def terminal_fill(problem, grid: TimeGrid, sgrid: SpaceGrid, access_log=None) -> SolutionField:
    fields = SolutionField(sgrid, grid.M + 1, access_log=access_log)
    for n in range(grid.M, grid.N - 1, -1):
        t = grid.time(n)
        y = np.broadcast_to(problem.terminal_y(t, sgrid.nodes), sgrid.nodes.shape)
        z = np.broadcast_to(problem.terminal_z(t, sgrid.nodes), sgrid.nodes.shape)
        fields.set_level(n, y, z)
    return fields


@dataclass
class NextLevelTerms:
    """Expectations at level ``n`` that only involve levels ``>= n+1``.

    ``gen`` maps a delay in steps to ``(E[f^{n+1}], E[f^{n+1} dW])``.
    """

    ey: np.ndarray
    ey_dw: np.ndarray
    gen: dict = field(default_factory=dict)


def next_level_terms(fields, problem, grid, schedule, rules, n, x) -> NextLevelTerms:
    ey, ey_dw = next_moments(fields.level(n + 1)[0], x, grid.dt, rules.outer)
    terms = NextLevelTerms(ey=ey, ey_dw=ey_dw)
    for m, _ in schedule.delays(n + 1):
        terms.gen[m] = generator_next_moments(problem, fields, n, m, x, grid, rules.outer, rules.inner)
    return terms


def _blend_next(schedule, n, terms, dw):
    idx = 1 if dw else 0
    acc = 0.0
    for m, k in schedule.delays(n + 1):
        acc = acc + k * terms.gen[m][idx]
    return acc


def z_step(fields, problem, grid, schedule, params, rules, n, x, terms=None):
    if terms is None:
        terms = next_level_terms(fields, problem, grid, schedule, rules, n, x)
    z = terms.ey_dw / grid.dt
    if params.theta2 != 1.0:
        z = z + ((1.0 - params.theta2) / params.theta3) * _blend_next(schedule, n, terms, dw=True)
    return z


def y_predictor(fields, problem, grid, schedule, rules, n, x, terms=None):
    if terms is None:
        terms = next_level_terms(fields, problem, grid, schedule, rules, n, x)
    lower = int(schedule.minus_idx[n + 1])
    if lower not in terms.gen:
        terms.gen[lower] = generator_next_moments(problem, fields, n, lower, x, grid, rules.outer, rules.inner)
    return terms.ey + grid.dt * terms.gen[lower][0]


def y_corrector(fields, problem, grid, schedule, params, rules, n, x, y_bar, z_n, terms=None):
    if terms is None:
        terms = next_level_terms(fields, problem, grid, schedule, rules, n, x)
    dt = grid.dt
    y = terms.ey
    if params.theta1 != 0.0:
        current = 0.0
        for m, k in schedule.delays(n):
            current = current + k * expect_generator_current(
                problem, fields, n, m, x, y_bar, z_n, grid, rules.inner
            )
        y = y + params.theta1 * dt * current
    if params.theta1 != 1.0:
        y = y + (1.0 - params.theta1) * dt * _blend_next(schedule, n, terms, dw=False)
    return y


def solve_level(fields, problem, grid, schedule, params, rules, n, x):
    """``(Y^n, Z^n)`` at the points ``x``."""
    terms = next_level_terms(fields, problem, grid, schedule, rules, n, x)
    z = z_step(fields, problem, grid, schedule, params, rules, n, x, terms)
    y_bar = y_predictor(fields, problem, grid, schedule, rules, n, x, terms)
    y = y_corrector(fields, problem, grid, schedule, params, rules, n, x, y_bar, z, terms)
    return y, z


def backward_solve(problem, params: ThetaParams, grid: TimeGrid, sgrid: SpaceGrid, rules: Rules,
                   schedule: DelaySchedule | None = None, n_jobs: int = 1, access_log=None) -> SolutionField:
    """Run the scheme from the terminal band down to level 0.

    ``n_jobs > 1`` splits the space nodes into contiguous chunks evaluated
    on a thread pool; the output is bitwise identical to the serial run.
    """
    if schedule is None:
        schedule = build_delay_schedule(grid, problem.delay)
    fields = terminal_fill(problem, grid, sgrid, access_log=access_log)
    x = sgrid.nodes
    chunks = np.array_split(x, n_jobs) if n_jobs > 1 else [x]
    pool = ThreadPoolExecutor(max_workers=n_jobs) if n_jobs > 1 else None
    try:
        for n in range(grid.N - 1, -1, -1):
            if pool is None:
                y, z = solve_level(fields, problem, grid, schedule, params, rules, n, x)
            else:
                parts = list(pool.map(
                    lambda xs: solve_level(fields, problem, grid, schedule, params, rules, n, xs), chunks
                ))
                y = np.concatenate([p[0] for p in parts])
                z = np.concatenate([p[1] for p in parts])
            _check_finite(n, x, y, z)
            fields.set_level(n, y, z)
    finally:
        if pool is not None:
            pool.shutdown()
    return fields


def _check_finite(n, x, y, z):
    bad = ~(np.isfinite(y) & np.isfinite(z))
    if bad.any():
        raise NonFiniteValue(n, float(x[np.argmax(bad)]))
