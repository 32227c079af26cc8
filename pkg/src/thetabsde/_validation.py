"""Input checks shared by the estimator and the CLI."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .errors import ValidationError
from .problems import Problem, get_problem


def check_problem(problem) -> Problem:
    if isinstance(problem, str):
        return get_problem(problem)
    if not isinstance(problem, Problem):
        raise ValidationError(f"expected a Problem or problem name, got {type(problem).__name__}")
    return problem


def check_points(X) -> np.ndarray:
    """Flatten scalars, 1-d arrays and single-column 2-d arrays to 1-d."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, ensure_2d=True, dtype=float)
    if arr.shape[1] != 1:
        raise ValidationError(f"space points are one-dimensional, got {arr.shape[1]} columns")
    return arr[:, 0]


def check_m_list(values) -> list[int]:
    out = []
    for v in values:
        if int(v) != v or v < 2:
            raise ValidationError(f"time step counts must be integers >= 2, got {v}")
        out.append(int(v))
    if not out:
        raise ValidationError("empty list of time step counts")
    return out
