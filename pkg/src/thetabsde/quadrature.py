"""Gauss-Hermite rules and Gaussian conditional-expectation evaluators.

All evaluators take the spatial point ``x`` as an array so a whole time
level is processed at once.  Weighted sums run in a fixed loop order over
the quadrature indices, which keeps results independent of how the spatial
points are chunked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OrderOutOfRange

MAX_ORDER = 64
SQRT_PI = math.sqrt(math.pi)
_PIM4 = math.pi ** -0.25


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for ``int g(x) exp(-x**2) dx`` (physicists' Hermite)."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)


def _orthonormal_hermite(z: float, G: int) -> tuple[float, float]:
    # Orthonormal recurrence, stays finite for G <= 64 over the root range.
    p1, p2 = _PIM4, 0.0
    for j in range(1, G + 1):
        p3 = p2
        p2 = p1
        p1 = z * math.sqrt(2.0 / j) * p2 - math.sqrt((j - 1) / j) * p3
    dp = math.sqrt(2.0 * G) * p2
    return p1, dp


def gauss_hermite_rule(G: int) -> QuadratureRule:
    """Gauss-Hermite rule of order ``G`` by Newton iteration on the recurrence.

    Initial guesses follow the usual asymptotic formulas for the largest
    root and extrapolation from previously found roots.  Exact for
    ``x**k exp(-x**2)`` with ``k <= 2G - 1``.
    """
    if int(G) != G or not 1 <= G <= MAX_ORDER:
        raise OrderOutOfRange(f"Gauss-Hermite order must be in [1, {MAX_ORDER}], got {G}")
    G = int(G)
    if G == 1:
        return _freeze(np.array([0.0]), np.array([SQRT_PI]))
    half = (G + 1) // 2
    pos = np.empty(half)
    wpos = np.empty(half)
    z = 0.0
    for i in range(half):
        if i == 0:
            z = math.sqrt(2 * G + 1) - 1.85575 * (2 * G + 1) ** (-1 / 6)
        elif i == 1:
            z -= 1.14 * G**0.426 / z
        elif i == 2:
            z = 1.86 * z - 0.86 * pos[0]
        elif i == 3:
            z = 1.91 * z - 0.91 * pos[1]
        else:
            z = 2.0 * z - pos[i - 2]
        for _ in range(100):
            p, dp = _orthonormal_hermite(z, G)
            step = p / dp
            z -= step
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        else:  # pragma: no cover - never observed for G <= 64
            raise ArithmeticError(f"Hermite root {i} of order {G} did not converge")
        _, dp = _orthonormal_hermite(z, G)
        pos[i] = z
        wpos[i] = 2.0 / (dp * dp)
    # pos holds roots in decreasing order; mirror for the negative half
    if G % 2:
        pos[-1] = 0.0
        nodes = np.concatenate([-pos, pos[-2::-1]])
        weights = np.concatenate([wpos, wpos[-2::-1]])
    else:
        nodes = np.concatenate([-pos, pos[::-1]])
        weights = np.concatenate([wpos, wpos[::-1]])
    return _freeze(nodes, weights)


def _freeze(nodes, weights):
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


def gaussian_moment(k: int) -> float:
    """``int x**k exp(-x**2) dx`` in closed form."""
    if k % 2:
        return 0.0
    return math.gamma((k + 1) / 2)


def next_moments(field, x, dt, rule: QuadratureRule):
    """``(E[field(x + dW)], E[field(x + dW) dW])`` with ``dW ~ N(0, dt)``."""
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(2.0 * dt)
    plain = np.zeros_like(x)
    weighted = np.zeros_like(x)
    for p, w in zip(rule.nodes, rule.weights):
        g = w * field(x + scale * p)
        plain = plain + g
        weighted = weighted + g * (scale * p)
    return plain / SQRT_PI, weighted / SQRT_PI


def expect_next(field, x, dt, rule: QuadratureRule, weight_dW: bool = False):
    """Approximate ``E[field(x + dW)]`` (or ``E[field(x + dW) dW]``), ``dW ~ N(0, dt)``."""
    plain, weighted = next_moments(field, x, dt, rule)
    return weighted if weight_dW else plain


def generator_next_moments(problem, fields, n, m, x, grid, rule_outer, rule_inner):
    """Both ``E_{t_n}^x[f^{n+1}]`` and ``E_{t_n}^x[f^{n+1} dW]`` for delay ``m`` steps.

    The generator is evaluated at ``(t_{n+1}, Y^{n+1}, Z^{n+1}, Y^{n+1+m}, Z^{n+1+m})``
    where the delayed level is reached by a further independent increment
    of variance ``m * dt``.  For ``m == 0`` the delayed pair coincides with
    the current one and the inner sum disappears.
    """
    x = np.asarray(x, dtype=float)
    dt = grid.dt
    t = grid.time(n + 1)
    y_now, z_now = fields.level(n + 1)
    y_del, z_del = fields.level(n + 1 + m)
    scale = math.sqrt(2.0 * dt)
    shift = math.sqrt(2.0 * m * dt)
    f = problem.generator
    plain = np.zeros_like(x)
    weighted = np.zeros_like(x)
    for p, wp in zip(rule_outer.nodes, rule_outer.weights):
        xi = x + scale * p
        y1 = y_now(xi)
        z1 = z_now(xi)
        if m == 0:
            inner = f(t, y1, z1, y1, z1) * SQRT_PI
        else:
            inner = np.zeros_like(x)
            for q, wq in zip(rule_inner.nodes, rule_inner.weights):
                eta = xi + shift * q
                inner = inner + wq * f(t, y1, z1, y_del(eta), z_del(eta))
        inner = wp * inner
        plain = plain + inner
        weighted = weighted + inner * (scale * p)
    return plain / math.pi, weighted / math.pi


def expect_generator_next(problem, fields, n, m, x, grid, rule_outer, rule_inner, weight_dW=False):
    """Approximate ``E_{t_n}^x[f(t_{n+1}, Y^{n+1}, Z^{n+1}, Y^{n+1+m}, Z^{n+1+m})]``.

    With ``weight_dW`` the integrand is multiplied by the increment
    ``W_{t_{n+1}} - W_{t_n}``.
    """
    plain, weighted = generator_next_moments(problem, fields, n, m, x, grid, rule_outer, rule_inner)
    return weighted if weight_dW else plain


def expect_generator_current(problem, fields, n, m, x, y_bar, z_n, grid, rule):
    """Approximate ``E_{t_n}^x[f(t_n, y_bar, z_n, Y^{n+m}, Z^{n+m})]``.

    ``y_bar`` and ``z_n`` are already known at ``x``; only the delayed
    arguments are random.  ``m == 0`` substitutes ``(y_bar, z_n)`` for the
    delayed pair.
    """
    x = np.asarray(x, dtype=float)
    t = grid.time(n)
    f = problem.generator
    y_bar = np.broadcast_to(np.asarray(y_bar, dtype=float), x.shape)
    z_n = np.broadcast_to(np.asarray(z_n, dtype=float), x.shape)
    if m == 0:
        return np.asarray(f(t, y_bar, z_n, y_bar, z_n), dtype=float) * np.ones_like(x)
    y_del, z_del = fields.level(n + m)
    shift = math.sqrt(2.0 * m * grid.dt)
    acc = np.zeros_like(x)
    for q, w in zip(rule.nodes, rule.weights):
        eta = x + shift * q
        acc = acc + w * f(t, y_bar, z_n, y_del(eta), z_del(eta))
    return acc / SQRT_PI
