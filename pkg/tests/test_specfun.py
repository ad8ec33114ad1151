import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dmotif.errors import DomainError
from d2dmotif.specfun import (
    I0_CROSSOVER,
    SeriesControl,
    bessel_i0,
    bessel_i0e,
    i0e_array,
    lower_inc_gamma,
    regularized_lower_gamma,
)
from d2dmotif.quadrature import QuadratureSpec, integrate

# Extended-precision reference values (mpmath, 40 digits).
I0_AT_1 = 1.266065877752008335598244625214717537608
I0E_AT_700 = 0.01508129565153135758698617452984133470323
I0_AT_700 = 1.529593347671873736316207228890450864966e302


def test_i0_at_zero_is_one():
    assert bessel_i0(0.0) == 1.0


def test_i0_at_one_matches_fifty_term_series():
    brute = math.fsum((0.25) ** k / math.factorial(k) ** 2 for k in range(50))
    assert bessel_i0(1.0) == pytest.approx(brute, rel=1e-12)
    assert bessel_i0(1.0) == pytest.approx(I0_AT_1, rel=1e-12)


def test_i0_large_argument_stays_finite():
    assert bessel_i0e(700.0) == pytest.approx(I0E_AT_700, rel=1e-12)
    assert bessel_i0(700.0) == pytest.approx(I0_AT_700, rel=1e-12)


def test_i0_overflow_is_reported_as_infinity():
    assert bessel_i0(800.0) == math.inf
    assert bessel_i0e(800.0) == pytest.approx(float(mpmath.besseli(0, 800) * mpmath.exp(-800)),
                                              rel=1e-12)


def test_i0_branches_agree_at_crossover():
    below = bessel_i0e(np.nextafter(I0_CROSSOVER, 0.0))
    above = bessel_i0e(I0_CROSSOVER)
    assert abs(below - above) / above < 1e-11


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 2.0, 9.9, 14.999, 15.0, 20.0, 55.5, 300.0, 1e4])
def test_i0e_matches_mpmath(x):
    ref = float(mpmath.besseli(0, x) * mpmath.exp(-x))
    assert bessel_i0e(x) == pytest.approx(ref, rel=1e-12)


def test_i0e_array_matches_scalar():
    xs = np.concatenate([np.linspace(0, 40, 401), [100.0, 700.0, 5e3]])
    arr = i0e_array(xs)
    scalar = np.array([bessel_i0e(x) for x in xs])
    np.testing.assert_allclose(arr, scalar, rtol=1e-13)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_i0_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        bessel_i0(bad)


def test_i0_rejects_negative():
    with pytest.raises(DomainError):
        bessel_i0(-1.0)


@given(st.floats(0.0, 600.0), st.floats(1e-6, 50.0))
@settings(max_examples=200, deadline=None)
def test_i0_strictly_increasing(x, dx):
    assert bessel_i0(x + dx) > bessel_i0(x)


@pytest.mark.parametrize("x", [0.5, 2.0])
def test_lower_gamma_unit_shape_closed_form(x):
    assert lower_inc_gamma(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-12)


@pytest.mark.parametrize("a", [0.1, 1.0, 3.5, 40.0])
def test_lower_gamma_zero_argument(a):
    assert lower_inc_gamma(a, 0.0) == 0.0


def test_lower_gamma_matches_quadrature():
    tight = QuadratureSpec(relative_tolerance=1e-13, absolute_tolerance=1e-16)
    ref = integrate(lambda c: c * c * np.exp(-c), 0.0, 2.5, tight)[0]
    assert lower_inc_gamma(3.0, 2.5) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("a,x", [(0.5, 0.1), (1.0, 7.0), (2.5, 3.0), (10.0, 4.0), (10.0, 30.0),
                                 (50.0, 45.0), (1.0, 1e-9), (120.0, 200.0)])
def test_lower_gamma_matches_mpmath(a, x):
    ref = float(mpmath.gammainc(a, 0, x))
    assert lower_inc_gamma(a, x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("a", [0.5, 1.0, 4.0, 12.0])
def test_lower_gamma_limit_is_complete_gamma(a):
    assert lower_inc_gamma(a, 50.0 * a) == pytest.approx(math.gamma(a), rel=1e-9)


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (math.nan, 1.0),
                                 (1.0, math.inf)])
def test_lower_gamma_rejects_bad_input(a, x):
    with pytest.raises(DomainError):
        lower_inc_gamma(a, x)


@given(st.floats(0.05, 60.0), st.floats(0.0, 200.0), st.floats(0.0, 20.0))
@settings(max_examples=300, deadline=None)
def test_lower_gamma_bounded_and_monotone(a, x, dx):
    g1 = lower_inc_gamma(a, x)
    g2 = lower_inc_gamma(a, x + dx)
    assert 0.0 <= g1 <= math.gamma(a) * (1 + 1e-12)
    assert g2 >= g1 * (1 - 1e-12)
    assert 0.0 <= regularized_lower_gamma(a, x) <= 1.0


@pytest.mark.parametrize("kwargs", [
    {"relative_tolerance": 0.0}, {"relative_tolerance": 1e-2}, {"max_terms": 9},
    {"max_terms": 20.5},
])
def test_series_control_validation(kwargs):
    with pytest.raises(DomainError):
        SeriesControl(**kwargs)
