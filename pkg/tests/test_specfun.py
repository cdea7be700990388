import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import jv

from cavityqed.algebra import AlgebraKind
from cavityqed.errors import ConvergenceError
from cavityqed.specfun import (
    bessel_j,
    bessel_j_orders,
    bessel_zero_j0,
    displacement_elements,
    laguerre,
)

# values from mpmath at 40 digits
BESSEL_FROZEN = [
    (0, 1.0, 0.76519768655796655145),
    (1, 2.5, 0.49709410246427403801),
    (3, 4.0, 0.43017147387562194036),
    (-2, 0.8, 0.075817762484944727386),
    (5, -3.0, -0.043028434877047583925),
    (10, 5.0, 0.0014678026473104741311),
    (0, 50.0, 0.055812327669251815005),
    (7, 123.4, 0.020559647841190444452),
    (2, 650.0, 0.014412911686371034232),
]
LAGUERRE_FROZEN = [
    (5, 0.3, -0.093332749999999973046),
    (10, 1.0, 0.41894593253968253968),
    (20, 2.5, 0.46958998548190892385),
    (50, 0.7, 0.030487702508295055395),
]
J0_FIRST_ZERO = 2.4048255576957727686


@pytest.mark.parametrize("alpha,x,expected", BESSEL_FROZEN)
def test_bessel_frozen_values(alpha, x, expected):
    assert abs(bessel_j(alpha, x) - expected) <= 1e-10


def test_bessel_against_mpmath_small_argument_grid():
    worst = 0.0
    for alpha in range(-10, 11):
        for x in np.linspace(0.0, 5.0, 26):
            ref = float(mpmath.besselj(alpha, x))
            worst = max(worst, abs(bessel_j(alpha, x) - ref))
    assert worst <= 1e-10


@given(st.integers(min_value=-30, max_value=30), st.floats(min_value=-700, max_value=700))
def test_bessel_against_scipy_full_range(alpha, x):
    assert abs(bessel_j(alpha, x) - jv(alpha, x)) <= 1e-10


@given(st.integers(min_value=0, max_value=40), st.floats(min_value=-700, max_value=700))
def test_reflection_identities_hold_bitwise(alpha, x):
    pos = bessel_j(alpha, x)
    sign = (-1) ** alpha
    assert bessel_j(-alpha, x) == sign * pos
    assert bessel_j(alpha, -x) == sign * pos


@given(st.floats(min_value=0, max_value=40))
def test_sum_of_squares_normalization(x):
    j = bessel_j_orders(80, x)
    assert abs(np.sum(j**2) - 1.0) <= 1e-12


@pytest.mark.parametrize("x", [0.0, 0.8, 3.3, 11.9, 12.1, 47.0, -9.5])
def test_order_array_matches_scalar(x):
    arr = bessel_j_orders(12, x)
    for k, a in enumerate(range(-12, 13)):
        assert abs(arr[k] - bessel_j(a, x)) <= 1e-13


def test_bessel_domain_errors():
    with pytest.raises(ValueError):
        bessel_j(1, 700.5)
    with pytest.raises(ValueError):
        bessel_j(1.5, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, float("nan"))


def test_first_zero_of_j0():
    assert abs(bessel_zero_j0() - J0_FIRST_ZERO) <= 1e-13


@pytest.mark.parametrize("n,y,expected", LAGUERRE_FROZEN)
def test_laguerre_frozen_values(n, y, expected):
    assert abs(laguerre(n, y) - expected) <= 1e-12


@pytest.mark.parametrize("n", [0, 1, 2, 6, 12])
def test_laguerre_explicit_sum(n):
    y = np.linspace(0, 4, 9)
    ref = sum((-1) ** k * math.comb(n, k) * y**k / math.factorial(k) for k in range(n + 1))
    assert np.allclose(laguerre(n, y), ref, atol=1e-12)


def test_laguerre_recurrence_residual():
    y = np.linspace(0, 3, 13)
    for k in range(1, 50):
        lhs = (k + 1) * laguerre(k + 1, y)
        rhs = (2 * k + 1 - y) * laguerre(k, y) - k * laguerre(k - 1, y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_laguerre_rejects_negative_degree():
    with pytest.raises(ValueError):
        laguerre(-1, 0.5)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0])
def test_oscillator_diagonal_is_laguerre(x):
    tab = displacement_elements(AlgebraKind.heisenberg(), x, 128)
    for n in range(11):
        expected = math.exp(-x * x / 2) * laguerre(n, x * x)
        assert abs(tab.diagonal(n) - expected) <= 1e-8


@pytest.mark.parametrize("k,x", [(0.5, 0.3), (1.0, 0.8), (2.25, 0.5)])
def test_su11_ground_element(k, x):
    tab = displacement_elements(AlgebraKind.su11(k), x, 96)
    assert abs(tab.entry(0, 0) - math.cosh(x) ** (-2 * k)) <= 1e-10


@pytest.mark.parametrize("j,x", [(0.5, 0.4), (2, 1.1), (4.5, 0.25)])
def test_su2_lowest_weight_element(j, x):
    tab = displacement_elements(AlgebraKind.su2(j), x)
    assert tab.n_converged == tab.dim
    assert abs(tab.entry(0, 0) - math.cos(x) ** (2 * j)) <= 1e-12


def test_table_is_orthogonal_and_flip_is_transpose():
    tab = displacement_elements(AlgebraKind.su2(3), 0.7)
    v = tab.values
    assert np.allclose(v @ v.T, np.eye(tab.dim), atol=1e-12)
    other = displacement_elements(AlgebraKind.su2(3), -0.7)
    assert np.allclose(tab.flipped().values, other.values, atol=1e-12)


def test_unconverged_entries_are_refused():
    tab = displacement_elements(AlgebraKind.heisenberg(), 1.0, 16)
    assert 0 < tab.n_converged < 16
    with pytest.raises(ConvergenceError):
        tab.entry(tab.n_converged, 0)


def test_table_is_read_only():
    tab = displacement_elements(AlgebraKind.heisenberg(), 0.5, 32)
    with pytest.raises(ValueError):
        tab.values[0, 0] = 1.0
