"""Problem definitions for anticipated BSDEs of conditional-expectation type.

A problem is

    -dY_t = E[f(t, Y_t, Z_t, Y_{t+d(t)}, Z_{t+d(t)}) | F_t] dt - Z_t dW_t,  t in [0, T]
     Y_t = xi(t, W_t),  Z_t = eta(t, W_t),                                   t in [T, T+S]

All callables must accept numpy arrays and broadcast elementwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Problem:
    name: str
    generator: Callable
    delay: Callable[[float], float]
    terminal_y: Callable
    terminal_z: Callable
    T: float
    S: float
    exact_y: Optional[Callable] = None
    exact_z: Optional[Callable] = None
    x0: float = 0.0

    @property
    def has_exact(self) -> bool:
        return self.exact_y is not None and self.exact_z is not None

    def exact_at_start(self) -> tuple[float, float]:
        if not self.has_exact:
            raise ValidationError(f"problem {self.name!r} has no exact solution")
        return float(self.exact_y(0.0, self.x0)), float(self.exact_z(0.0, self.x0))


def _quarter_square(t):
    return 0.25 * t * t


def example1() -> Problem:
    """Linear problem with exact solution ``(e^t sin(t+W_t), e^t cos(t+W_t))``."""

    def f(t, y1, z1, y2, z2):
        d = _quarter_square(t)
        return -0.5 * y1 - (y2 * math.sin(d) + z2 * math.cos(d)) * math.exp(-d / 2)

    def y(t, x):
        return np.exp(t) * np.sin(t + x)

    def z(t, x):
        return np.exp(t) * np.cos(t + x)

    return Problem("example1", f, _quarter_square, y, z, T=1.0, S=0.25, exact_y=y, exact_z=z)


def example2() -> Problem:
    """Nonlinear problem with exact solution ``(sin(t+W_t), cos(t+W_t))``."""

    def f(t, y1, z1, y2, z2):
        d = _quarter_square(t)
        num = y1 - 2.0 * (y2 * math.sin(d) + z2 * math.cos(d)) * math.exp(d / 2)
        return num / (y1 * y1 + z1 * z1 + 1.0)

    def y(t, x):
        return np.sin(t + x)

    def z(t, x):
        return np.cos(t + x)

    return Problem("example2", f, _quarter_square, y, z, T=1.0, S=0.25, exact_y=y, exact_z=z)


def _zero(t, y1, z1, y2, z2):
    return np.zeros(np.broadcast(y1, z1, y2, z2).shape)


def zero_generator_problem(T=1.0, S=0.25, family="sin", constant=1.0) -> Problem:
    """``f = 0`` with terminal data from a family whose heat semigroup is known.

    ``family`` is one of ``"sin"`` (terminal ``sin(t+x)``), ``"const"``
    (``constant``) or ``"linear"`` (``x``).  On ``[0, T]`` the exact solution
    is the conditional expectation of the time-``T`` terminal value.
    """
    if family == "sin":
        def y(t, x):
            t = np.asarray(t, dtype=float)
            damp = np.exp(-0.5 * np.maximum(T - t, 0.0))
            return np.where(t >= T, np.sin(t + x), damp * np.sin(T + x))

        def z(t, x):
            t = np.asarray(t, dtype=float)
            damp = np.exp(-0.5 * np.maximum(T - t, 0.0))
            return np.where(t >= T, np.cos(t + x), damp * np.cos(T + x))
    elif family == "const":
        def y(t, x):
            return np.full(np.broadcast(t, x).shape, float(constant))

        def z(t, x):
            return np.zeros(np.broadcast(t, x).shape)
    elif family == "linear":
        def y(t, x):
            return np.broadcast_to(np.asarray(x, dtype=float), np.broadcast(t, x).shape).copy()

        def z(t, x):
            return np.ones(np.broadcast(t, x).shape)
    else:
        raise ValidationError(f"unknown terminal family {family!r}")
    return Problem(f"zero-gen-{family}", _zero, _quarter_square, y, z, T=T, S=S, exact_y=y, exact_z=z)


PROBLEMS = {
    "example1": example1,
    "example2": example2,
    "zero-gen-sin": lambda: zero_generator_problem(family="sin"),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValidationError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
