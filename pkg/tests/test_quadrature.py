import math

import numpy as np
import pytest

from thetabsde.errors import LevelNotPopulated, OrderOutOfRange
from thetabsde.grid import build_time_grid
from thetabsde.problems import Problem
from thetabsde.quadrature import (SQRT_PI, expect_generator_current, expect_generator_next, expect_next,
                                  gauss_hermite_rule, gaussian_moment)

from conftest import AnalyticField, AnalyticLevels


def normal_moment(k, var):
    """E[X**k] for X ~ N(0, var), by the double factorial formula."""
    if k % 2:
        return 0.0
    return var ** (k // 2) * math.prod(range(k - 1, 0, -2))


def shifted_moment(x, k, var):
    """E[(x + X)**k] by binomial expansion."""
    return sum(math.comb(k, j) * x ** (k - j) * normal_moment(j, var) for j in range(k + 1))


def test_order_one_and_two():
    r1 = gauss_hermite_rule(1)
    assert r1.nodes.tolist() == [0.0] and r1.weights[0] == pytest.approx(SQRT_PI, rel=1e-15)
    r2 = gauss_hermite_rule(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    np.testing.assert_allclose(r2.weights, [SQRT_PI / 2] * 2, rtol=1e-15)


def test_order_eight_moments():
    r = gauss_hermite_rule(8)
    assert r.weights.sum() == pytest.approx(1.7724538509, abs=1e-10)
    assert np.dot(r.weights, r.nodes**4) == pytest.approx(0.75 * SQRT_PI, rel=1e-12)


@pytest.mark.parametrize("G", [0, 65, 2.5])
def test_order_out_of_range(G):
    with pytest.raises(OrderOutOfRange):
        gauss_hermite_rule(G)


@pytest.mark.parametrize("G", [1, 2, 3, 5, 8, 13, 16, 24, 32, 48, 64])
def test_rule_structure(G):
    r = gauss_hermite_rule(G)
    assert r.order == G
    assert np.all(np.diff(r.nodes) > 0)
    np.testing.assert_allclose(r.nodes, -r.nodes[::-1], atol=1e-14)
    np.testing.assert_allclose(r.weights, r.weights[::-1], rtol=1e-12)
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(SQRT_PI, rel=1e-12)


@pytest.mark.parametrize("G", [4, 16, 40, 64])
def test_matches_golub_welsch(G):
    # independent route: eigenvalues of the Jacobi matrix
    off = np.sqrt(np.arange(1, G) / 2.0)
    evals, evecs = np.linalg.eigh(np.diag(off, 1) + np.diag(off, -1))
    r = gauss_hermite_rule(G)
    np.testing.assert_allclose(r.nodes, evals, atol=1e-12)
    big = r.weights > 1e-10 * r.weights.max()  # eigenvector route loses tiny weights
    np.testing.assert_allclose(r.weights[big], (SQRT_PI * evecs[0] ** 2)[big], rtol=1e-8)


def test_nodes_are_roots():
    from numpy.polynomial.hermite import hermval

    for G in (5, 10, 20):
        r = gauss_hermite_rule(G)
        coef = np.zeros(G + 1)
        coef[-1] = 1.0
        scale = np.max(np.abs(hermval(np.linspace(r.nodes[0], r.nodes[-1], 101), coef)))
        assert np.max(np.abs(hermval(r.nodes, coef))) < 1e-12 * scale


# --- expect_next -----------------------------------------------------------

X = np.array([-1.3, 0.0, 0.4, 2.0])


@pytest.mark.parametrize("dt", [0.01, 0.3, 1.0])
def test_expect_next_constant_and_linear(gh8, dt):
    np.testing.assert_allclose(expect_next(lambda x: 0 * x + 2.5, X, dt, gh8), 2.5, rtol=1e-14)
    np.testing.assert_allclose(expect_next(lambda x: x, X, dt, gh8), X, atol=1e-14)


@pytest.mark.parametrize("dt", [0.01, 0.3])
def test_expect_next_dw_weight(dt):
    r = gauss_hermite_rule(2)
    np.testing.assert_allclose(expect_next(lambda x: x, X, dt, r, weight_dW=True), dt, rtol=1e-13)
    np.testing.assert_allclose(expect_next(lambda x: x**2, X, dt, r, weight_dW=True), 2 * X * dt,
                               rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("G", [2, 4, 8])
def test_expect_next_polynomial_exactness(G):
    r = gauss_hermite_rule(G)
    dt = 0.37
    for k in range(2 * G):
        got = expect_next(lambda x: x**k, X, dt, r)
        want = np.array([shifted_moment(x, k, dt) for x in X])
        np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-11 * max(1.0, np.abs(want).max()))
    for k in range(2 * G - 1):
        # x^k * dW has degree k+1 in the node
        got = expect_next(lambda x: x**k, X, dt, r, weight_dW=True)
        want = np.array([
            sum(math.comb(k, j) * x ** (k - j) * normal_moment(j + 1, dt) for j in range(k + 1)) for x in X
        ])
        np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-11 * max(1.0, np.abs(want).max()))


def test_stein_identity_discrete(gh8):
    # E[Y(x+dW) dW] / dt approximates E[Y'(x+dW)] with O(dt) error
    x = np.linspace(-2, 2, 9)
    errs = []
    for dt in (0.04, 0.02, 0.01):
        lhs = expect_next(np.sin, x, dt, gh8, weight_dW=True) / dt
        rhs = expect_next(np.cos, x, dt, gh8)
        errs.append(np.max(np.abs(lhs - rhs)))
    assert errs[0] <= 1.0 * 0.04
    # Gaussian integration by parts is exact, so the residue is quadrature-level
    assert max(errs) < 1e-10


# --- generator evaluators ---------------------------------------------------

def make_problem(f):
    return Problem("t", f, lambda t: 0.0, None, None, T=1.0, S=0.25)


GRID = build_time_grid(1.0, 0.25, 35)


def lin_levels(levels=range(0, 36)):
    return AnalyticLevels(lambda x: x, lambda x: 0 * x + 1.0, levels)


@pytest.mark.parametrize("m", [0, 1, 3])
def test_generator_next_constant(rules8, m):
    p = make_problem(lambda t, y1, z1, y2, z2: 0 * y1 + 4.0)
    got = expect_generator_next(p, lin_levels(), 2, m, X, GRID, rules8.outer, rules8.inner)
    np.testing.assert_allclose(got, 4.0, rtol=1e-14)


@pytest.mark.parametrize("m", [0, 2, 5])
def test_generator_next_martingale(rules8, m):
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    got = expect_generator_next(p, lin_levels(), 2, m, X, GRID, rules8.outer, rules8.inner)
    np.testing.assert_allclose(got, X, atol=1e-13)


@pytest.mark.parametrize("m", [0, 2, 5])
def test_generator_next_product(m):
    r = gauss_hermite_rule(2)
    p = make_problem(lambda t, y1, z1, y2, z2: y1 * y2)
    got = expect_generator_next(p, lin_levels(), 2, m, X, GRID, r, r)
    np.testing.assert_allclose(got, X**2 + GRID.dt, rtol=1e-12)


def test_generator_next_dw_weight(rules8):
    # E[(x+xi)(x+xi+eta) xi] = 2 x dt
    p = make_problem(lambda t, y1, z1, y2, z2: y1 * y2)
    got = expect_generator_next(p, lin_levels(), 2, 3, X, GRID, rules8.outer, rules8.inner, weight_dW=True)
    np.testing.assert_allclose(got, 2 * X * GRID.dt, rtol=1e-12, atol=1e-15)


def test_generator_next_tower_property(rules8):
    m, dt = 4, GRID.dt
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    levels = AnalyticLevels(np.sin, np.cos, range(36))
    got = expect_generator_next(p, levels, 2, m, X, GRID, rules8.outer, rules8.inner)
    inner = lambda x: expect_next(np.sin, x, m * dt, rules8.inner)  # noqa: E731
    np.testing.assert_allclose(got, expect_next(inner, X, dt, rules8.outer), atol=1e-10)
    np.testing.assert_allclose(got, np.exp(-(m + 1) * dt / 2) * np.sin(X), atol=1e-10)


def test_generator_next_missing_level(rules8):
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    with pytest.raises(LevelNotPopulated):
        expect_generator_next(p, lin_levels([3]), 2, 2, X, GRID, rules8.outer, rules8.inner)


def test_generator_current_m0(gh8):
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    got = expect_generator_current(p, lin_levels([]), 4, 0, X, 3.5, 0.0, GRID, gh8)
    np.testing.assert_allclose(got, 3.5)


def test_generator_current_delayed(gh8):
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    np.testing.assert_allclose(expect_generator_current(p, lin_levels(), 4, 2, X, 0.0, 0.0, GRID, gh8), X,
                               atol=1e-13)
    p2 = make_problem(lambda t, y1, z1, y2, z2: y2**2)
    np.testing.assert_allclose(expect_generator_current(p2, lin_levels(), 4, 2, X, 0.0, 0.0, GRID, gh8),
                               X**2 + 2 * GRID.dt, rtol=1e-12)


def test_generator_current_missing_level(gh8):
    p = make_problem(lambda t, y1, z1, y2, z2: y2)
    with pytest.raises(LevelNotPopulated):
        expect_generator_current(p, lin_levels([1]), 4, 2, X, 0.0, 0.0, GRID, gh8)


def test_gaussian_moment_closed_form():
    assert gaussian_moment(0) == pytest.approx(SQRT_PI)
    assert gaussian_moment(4) == pytest.approx(0.75 * SQRT_PI)
    assert gaussian_moment(3) == 0.0


def test_analytic_field_helper():
    assert AnalyticField(np.sin)(0.0) == 0.0
