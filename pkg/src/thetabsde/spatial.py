"""Uniform space grid and not-a-knot cubic spline fields.

The grid spacing balances spatial interpolation error against the time
discretisation error: ``dt**(p+1) == dx**4`` for a scheme of order ``p``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridTooLarge, TooFewNodes, ValidationError

INTERPOLATION_ORDER = 4
DEFAULT_NODE_CAP = 2**22


@dataclass(frozen=True)
class SpaceGrid:
    center: float
    half_width: float
    dx: float
    nodes: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def lower(self) -> float:
        return float(self.nodes[0])

    @property
    def upper(self) -> float:
        return float(self.nodes[-1])


def build_space_grid(x0, T_plus_S, dt, scheme_order, width_multiplier=10.0, max_nodes=DEFAULT_NODE_CAP):
    """Odd-sized uniform grid centred at ``x0``.

    ``dx = dt**((p+1)/4)`` and the half width ``width_multiplier * sqrt(T+S)``
    is rounded up to a whole number of steps.
    """
    if scheme_order not in (1, 2):
        raise ValidationError(f"scheme order must be 1 or 2, got {scheme_order}")
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if not width_multiplier > 0:
        raise ValidationError(f"width multiplier must be positive, got {width_multiplier}")
    if not T_plus_S > 0:
        raise ValidationError(f"T+S must be positive, got {T_plus_S}")
    dx = dt ** ((scheme_order + 1) / INTERPOLATION_ORDER)
    steps = math.ceil(width_multiplier * math.sqrt(T_plus_S) / dx - 1e-9)
    count = 2 * steps + 1
    if count > max_nodes:
        raise GridTooLarge(f"space grid needs {count} nodes, cap is {max_nodes}")
    nodes = x0 + dx * np.arange(-steps, steps + 1, dtype=float)
    nodes[steps] = x0
    nodes.setflags(write=False)
    return SpaceGrid(center=float(x0), half_width=steps * dx, dx=dx, nodes=nodes)


class SplineField:
    """Cubic spline through nodal values, clamped to boundary values outside.

    ``clamp_count`` tallies evaluation points that fell outside the grid.
    """

    def __init__(self, grid: SpaceGrid, values):
        values = np.array(values, dtype=float)
        if grid.size < 4:
            raise TooFewNodes(f"not-a-knot spline needs at least 4 nodes, got {grid.size}")
        if values.shape != (grid.size,):
            raise ValidationError(f"expected {grid.size} values, got shape {values.shape}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self._spline = CubicSpline(grid.nodes, values, bc_type="not-a-knot", extrapolate=False)
        self._lock = threading.Lock()
        self.clamp_count = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid.lower, self.grid.upper
        outside = np.count_nonzero((x < lo) | (x > hi))
        if outside:
            with self._lock:
                self.clamp_count += int(outside)
            x = np.clip(x, lo, hi)
        return self._spline(x)

    @property
    def coefficients(self) -> np.ndarray:
        return self._spline.c


def spline_fit(grid: SpaceGrid, values) -> SplineField:
    return SplineField(grid, values)


def spline_eval(field: SplineField, x):
    return field(x)
