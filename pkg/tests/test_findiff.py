from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from fde.errors import GridTooSmall, IndexOutOfRange
from fde.findiff import apply_stencil, make_stencil, stencil_at
from fde.quadrature import GridFunction, UniformGrid


def test_left_first_derivative_stencil():
    st = make_stencil(1, 2, "left")
    assert st.offsets == (0, 1, 2)
    assert st.exact_weights == (Fraction(-3, 2), Fraction(2), Fraction(-1, 2))


def test_central_first_derivative_drops_zero_weight():
    st = make_stencil(1, 2)
    assert st.offsets == (-1, 1)
    assert st.weights == (-0.5, 0.5)


def test_second_derivative_of_square():
    g = UniformGrid(10)
    psi = GridFunction.sample(g, lambda t: t**2)
    assert apply_stencil(make_stencil(2, 2), psi, 5) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6, 7])
@pytest.mark.parametrize("k", [2, 4])
def test_moment_exactness_rational(m, k):
    for position, offset in [("interior", 0), ("left", 0), ("left", 1), ("right", 0), ("right", 1)]:
        st = make_stencil(m, k, position, offset)
        w = st.exact_weights
        offsets = st.offsets
        for j in range(m + k):
            got = sum(wi * Fraction(o) ** j for o, wi in zip(offsets, w))
            assert got == (factorial(m) if j == m else 0), (position, offset, j)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("k", [2, 4])
def test_moment_exactness_float(m, k):
    h = 0.1
    x0 = 0.3
    for position, offset in [("interior", 0), ("left", 0), ("left", 1), ("right", 0), ("right", 1)]:
        st = make_stencil(m, k, position, offset)
        assert abs(sum(st.weights)) < 1e-12
        for j in range(m + k):
            got = sum(w * (x0 + o * h) ** j for o, w in zip(st.offsets, st.weights)) / h**m
            want = factorial(j) / factorial(j - m) * x0 ** (j - m) if j >= m else 0.0
            assert got == pytest.approx(want, abs=1e-12 if m <= 2 else 1e-10), (position, j)


def test_apply_at_boundaries():
    g = UniformGrid(100)
    assert apply_stencil(stencil_at(1, 2, 0, 100), GridFunction.sample(g, np.exp), 0) == pytest.approx(1.0, abs=1e-3)
    g = UniformGrid(10)
    cube = GridFunction.sample(g, lambda t: t**3)
    assert apply_stencil(stencil_at(2, 2, 10, 10), cube, 10) == pytest.approx(6.0, abs=1e-12)
    const = GridFunction.sample(g, lambda t: np.full_like(t, 3.0))
    assert apply_stencil(make_stencil(1, 2), const, 4) == 0.0


def test_apply_with_raw_array():
    values = np.arange(11, dtype=float) * 0.1
    assert apply_stencil(make_stencil(1, 2), values, 3, h=0.1) == pytest.approx(1.0)


def test_stencil_leaving_grid():
    g = UniformGrid(10)
    with pytest.raises(IndexOutOfRange):
        apply_stencil(make_stencil(1, 2), GridFunction.sample(g, np.sin), 0)


def test_grid_too_small_and_bad_arguments():
    with pytest.raises(GridTooSmall):
        stencil_at(4, 4, 0, 6)
    with pytest.raises(ValueError):
        make_stencil(0, 2)
    with pytest.raises(ValueError):
        make_stencil(1, 3)


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("k", [2, 4])
def test_observed_order_on_sine(m, k):
    # for D2 at O(h^4) the one-sided stencils reach the roundoff floor
    # (about 1e-16 * sum|w| / h^2) at h = 1/256, so that sweep stops at 1/128
    ladder = (32, 64, 128) if (m, k) == (2, 4) else (32, 64, 128, 256)
    errors = []
    for n in ladder:
        g = UniformGrid(n)
        psi = GridFunction.sample(g, np.sin)
        exact = [np.cos, lambda t: -np.sin(t)][m - 1](g.nodes)
        got = np.array([apply_stencil(stencil_at(m, k, i, n), psi, i) for i in range(n + 1)])
        errors.append(np.max(np.abs(got - exact)))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(np.abs(rates - k) <= 0.2), rates
