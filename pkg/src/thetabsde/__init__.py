"""Explicit theta-schemes for anticipated BSDEs."""
from .bench import BenchConfig, ConvergenceReport, ErrorReport, emit_csv, estimate_rate, run_convergence
from .estimator import ThetaSchemeSolver
from .grid import DelaySchedule, TimeGrid, build_delay_schedule, build_time_grid
from .problems import Problem, example1, example2, get_problem, zero_generator_problem
from .quadrature import (QuadratureRule, expect_generator_current, expect_generator_next, expect_next,
                         gauss_hermite_rule)
from .scheme import Rules, SolutionField, ThetaParams, backward_solve, terminal_fill
from .spatial import SpaceGrid, SplineField, build_space_grid, spline_eval, spline_fit

__version__ = "0.1.0"
