"""Uniform time partition of ``[0, T+S]`` and the delay schedule.

The live interval ``[0, T]`` holds ``N`` steps, the terminal band
``[T, T+S]`` holds ``K`` steps.  Anticipated times ``t_n + delta(t_n)`` are
bracketed by the grid indices ``n + minus_idx[n]`` and ``n + plus_idx[n]``
and blended with weight ``weight[n]`` on the lower index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DelayOutOfRange, NonIntegerSplit, ValidationError

SPLIT_TOL = 1e-9
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    T: float
    S: float
    M: int
    dt: float
    N: int
    K: int

    def time(self, n: int) -> float:
        if n == self.N:
            return self.T
        if n == self.M:
            return self.T + self.S
        return n * (self.T + self.S) / self.M

    @property
    def times(self) -> np.ndarray:
        return np.array([self.time(n) for n in range(self.M + 1)])


def build_time_grid(T: float, S: float, M: int) -> TimeGrid:
    """Split ``[0, T+S]`` into ``M`` equal steps with ``T`` on a grid point.

    Raises
    ------
    NonIntegerSplit
        If ``T * M / (T + S)`` is not an integer, i.e. ``T`` would fall
        between two grid points.
    """
    if not T > 0:
        raise ValidationError(f"T must be positive, got {T}")
    if not S >= 0:
        raise ValidationError(f"S must be non-negative, got {S}")
    if int(M) != M or M < 2:
        raise ValidationError(f"M must be an integer >= 2, got {M}")
    M = int(M)
    live = T * M / (T + S)
    N = round(live)
    if abs(live - N) > SPLIT_TOL or N < 1:
        raise NonIntegerSplit(
            f"M={M} does not split [0, T+S] with T={T}, S={S} into integer "
            f"live/terminal step counts (N would be {live:.6g})"
        )
    return TimeGrid(T=float(T), S=float(S), M=M, dt=(T + S) / M, N=N, K=M - N)


@dataclass(frozen=True)
class DelaySchedule:
    minus_idx: np.ndarray
    plus_idx: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return len(self.weight)

    def at(self, n: int) -> tuple[int, int, float]:
        return int(self.minus_idx[n]), int(self.plus_idx[n]), float(self.weight[n])

    def delays(self, n: int) -> list[tuple[int, float]]:
        """``(steps, weight)`` pairs with non-zero weight at level ``n``."""
        lo, hi, k = self.at(n)
        if hi == lo or k == 1.0:
            return [(lo, 1.0)]
        return [(lo, k), (hi, 1.0 - k)]


def build_delay_schedule(grid: TimeGrid, delta: Callable[[float], float]) -> DelaySchedule:
    """Bracket ``delta(t_n)`` by grid multiples for ``n = 0..N``.

    Delays that are (within ``1e-9`` steps) a whole number of steps get
    ``plus_idx == minus_idx`` and weight 1.
    """
    count = grid.N + 1
    minus = np.empty(count, dtype=np.int64)
    plus = np.empty(count, dtype=np.int64)
    weight = np.empty(count, dtype=float)
    horizon = grid.T + grid.S
    tol = SNAP_TOL * grid.dt
    for n in range(count):
        t = grid.time(n)
        d = float(delta(t))
        if not math.isfinite(d) or d < -tol:
            raise ValidationError(f"delta({t}) = {d} must be finite and non-negative")
        if t + d > horizon + tol:
            raise DelayOutOfRange(
                f"anticipated time t+delta(t) = {t + d} exceeds T+S = {horizon} at n={n}"
            )
        ratio = max(d, 0.0) / grid.dt
        nearest = round(ratio)
        if abs(ratio - nearest) <= SNAP_TOL:
            minus[n] = plus[n] = nearest
            weight[n] = 1.0
        else:
            lo = math.floor(ratio)
            minus[n] = lo
            plus[n] = lo + 1
            weight[n] = (lo + 1) - ratio
        if n + plus[n] > grid.M:
            raise DelayOutOfRange(f"delay index n+{plus[n]} beyond level {grid.M} at n={n}")
    for arr in (minus, plus, weight):
        arr.setflags(write=False)
    return DelaySchedule(minus_idx=minus, plus_idx=plus, weight=weight)
