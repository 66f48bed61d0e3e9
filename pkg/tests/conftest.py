import numpy as np
import pytest
from fractions import Fraction


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def exp_poly_coeffs(degree=12):
    """Power-series coefficients of a degree-12 interpolant of exp on [0, 1]."""
    cheb = np.polynomial.chebyshev.Chebyshev.interpolate(np.exp, degree, domain=[0, 1])
    coef = cheb.convert(kind=np.polynomial.Polynomial, domain=[0, 1], window=[0, 1]).coef
    return [Fraction(float(c)) for c in coef]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
