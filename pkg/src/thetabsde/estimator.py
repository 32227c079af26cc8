"""Scikit-learn style front end for the theta-scheme solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_problem
from .grid import build_delay_schedule, build_time_grid
from .quadrature import gauss_hermite_rule
from .scheme import Rules, ThetaParams, backward_solve
from .spatial import DEFAULT_NODE_CAP, build_space_grid


class ThetaSchemeSolver(BaseEstimator):
    """Explicit theta-scheme for an anticipated BSDE.

    ``fit(problem)`` runs the backward iteration with ``n_steps`` time steps
    on ``[0, T+S]``.  After fitting, ``predict(X)`` returns ``Y^0`` and
    ``predict_z(X)`` returns ``Z^0`` at space points ``X`` (spline
    interpolated between grid nodes).

    Parameters
    ----------
    theta1, theta2, theta3 : float
        Blending weights; ``(0.5, 0.5, 0.5)`` gives the second-order scheme.
    n_steps : int
        Number of time steps ``M`` over ``[0, T+S]``.
    gh_order : int
        Gauss-Hermite order for the one-step increment.
    gh_order_inner : int or None
        Order for the delayed increment; defaults to ``gh_order``.
    gamma : float
        Space domain half width in units of ``sqrt(T+S)``.
    n_jobs : int
        Threads used across space nodes within a time level.
    """

    def __init__(self, theta1=0.5, theta2=0.5, theta3=0.5, n_steps=35, gh_order=8,
                 gh_order_inner=None, gamma=10.0, n_jobs=1, max_nodes=DEFAULT_NODE_CAP):
        self.theta1 = theta1
        self.theta2 = theta2
        self.theta3 = theta3
        self.n_steps = n_steps
        self.gh_order = gh_order
        self.gh_order_inner = gh_order_inner
        self.gamma = gamma
        self.n_jobs = n_jobs
        self.max_nodes = max_nodes

    @property
    def params(self) -> ThetaParams:
        return ThetaParams(self.theta1, self.theta2, self.theta3)

    def fit(self, problem, y=None, access_log=None):
        problem = check_problem(problem)
        params = self.params
        grid = build_time_grid(problem.T, problem.S, self.n_steps)
        schedule = build_delay_schedule(grid, problem.delay)
        sgrid = build_space_grid(problem.x0, problem.T + problem.S, grid.dt, params.scheme_order(),
                                 self.gamma, max_nodes=self.max_nodes)
        outer = gauss_hermite_rule(self.gh_order)
        inner = outer if self.gh_order_inner in (None, self.gh_order) else gauss_hermite_rule(self.gh_order_inner)
        solution = backward_solve(problem, params, grid, sgrid, Rules(outer, inner), schedule=schedule,
                                  n_jobs=max(1, int(self.n_jobs)), access_log=access_log)
        self.problem_ = problem
        self.grid_ = grid
        self.schedule_ = schedule
        self.space_grid_ = sgrid
        self.solution_ = solution
        self.y0_, self.z0_ = solution.value_at(0, problem.x0)
        self.clamp_count_ = solution.clamp_count()
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        return self.solution_.level(0)[0](check_points(X))

    def predict_z(self, X):
        check_is_fitted(self, "solution_")
        return self.solution_.level(0)[1](check_points(X))

    def errors(self) -> tuple[float, float]:
        """Absolute errors of ``(Y^0, Z^0)`` at ``x0`` against the exact solution."""
        check_is_fitted(self, "solution_")
        ey, ez = self.problem_.exact_at_start()
        return abs(self.y0_ - ey), abs(self.z0_ - ez)

    def score(self, problem=None, y=None):
        """Negated ``|Y^0 - Y_0|`` so that larger is better."""
        return -self.errors()[0]

    def level_values(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        check_is_fitted(self, "solution_")
        return self.solution_.y_values(n), self.solution_.z_values(n)
