import pytest

from thetabsde.quadrature import gauss_hermite_rule
from thetabsde.scheme import Rules


@pytest.fixture(scope="session")
def gh8():
    return gauss_hermite_rule(8)


@pytest.fixture(scope="session")
def rules8(gh8):
    return Rules(gh8, gh8)


class AnalyticField:
    """Stands in for a SplineField with an exact callable."""

    def __init__(self, fn):
        self.fn = fn
        self.clamp_count = 0

    def __call__(self, x):
        return self.fn(x)


class AnalyticLevels:
    """Minimal SolutionField: the same analytic (Y, Z) pair at every listed level."""

    def __init__(self, y, z, levels):
        self.pair = (AnalyticField(y), AnalyticField(z))
        self.levels = set(levels)

    def level(self, n):
        from thetabsde.errors import LevelNotPopulated

        if n not in self.levels:
            raise LevelNotPopulated(n)
        return self.pair


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
