import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from efas_mimo.errors import NumericalDomainError
from efas_mimo.special import (
    E1_SERIES_CROSSOVER,
    EULER_GAMMA,
    exp_integral_e1,
    exp_scaled_e1,
    ln_gamma,
    regularized_lower_gamma,
    regularized_lower_gamma_int,
)

from oracles import E1_AT_1, E1_AT_50, LN_GAMMA_13, LOWER_GAMMA


def quad_e1(x: float) -> float:
    with mp.workdps(30):
        return float(mp.quad(lambda t: mp.exp(-t) / t, [x, x + 1, x + 10, mp.inf]))


def quad_lower_gamma(a: float, x: float) -> float:
    with mp.workdps(30):
        a, x = mp.mpf(a), mp.mpf(x)
        val = mp.quad(lambda t: t ** (a - 1) * mp.exp(-t), [0, min(x, a), x]) / mp.gamma(a)
        return float(val)


def test_e1_golden_values():
    assert exp_integral_e1(1.0) == pytest.approx(E1_AT_1, abs=1e-10, rel=1e-14)
    assert exp_integral_e1(50.0) == pytest.approx(E1_AT_50, rel=1e-12)


def test_e1_bracketing_inequality_at_50():
    x = 50.0
    assert math.exp(-x) / (x + 1) < exp_integral_e1(x) < math.exp(-x) / x


@pytest.mark.parametrize("x", [1e-8, 1e-6, 1e-3, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 5.0, 20.0, 80.0, 300.0])
def test_e1_against_quadrature(x):
    assert exp_integral_e1(x) == pytest.approx(quad_e1(x), rel=1e-10)


def test_e1_small_argument_expansion():
    x = 1e-6
    residual = exp_integral_e1(x) + EULER_GAMMA + math.log(x) - x
    assert abs(residual) < 1e-11


def test_e1_continuous_across_method_switch():
    lo = exp_integral_e1(E1_SERIES_CROSSOVER)
    hi = exp_integral_e1(math.nextafter(E1_SERIES_CROSSOVER, 2.0))
    assert hi == pytest.approx(lo, rel=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_e1_domain(bad):
    with pytest.raises(NumericalDomainError):
        exp_integral_e1(bad)


def test_scaled_e1_large_argument_stays_finite():
    # e^x E1(x) ~ 1/x for large x
    x = 1e6
    assert exp_scaled_e1(x) == pytest.approx(1.0 / (x + 1.0), rel=1e-6)


@given(st.floats(min_value=1e-6, max_value=200.0))
def test_e1_is_positive_and_decreasing(x):
    assert exp_integral_e1(x) > 0
    assert exp_integral_e1(x * 1.01) < exp_integral_e1(x)


@given(st.floats(min_value=1e-3, max_value=50.0))
@settings(max_examples=50)
def test_e1_derivative_is_minus_exp_over_x(x):
    h = 1e-6 * x
    fd = (exp_integral_e1(x + h) - exp_integral_e1(x - h)) / (2 * h)
    assert fd == pytest.approx(-math.exp(-x) / x, rel=1e-5)


def test_ln_gamma_values():
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(13.0) == pytest.approx(LN_GAMMA_13, rel=1e-15)
    assert ln_gamma(13.0) == pytest.approx(math.log(479001600), rel=1e-15)


@pytest.mark.parametrize("x", [0.5, 1.5, 7.3])
def test_ln_gamma_recurrence(x):
    assert abs(ln_gamma(x + 1) - ln_gamma(x) - math.log(x)) < 1e-12


@pytest.mark.parametrize("bad", [0.0, -2.0, math.inf])
def test_ln_gamma_domain(bad):
    with pytest.raises(NumericalDomainError):
        ln_gamma(bad)


@pytest.mark.parametrize("key", sorted(LOWER_GAMMA))
def test_lower_gamma_golden(key):
    assert regularized_lower_gamma(*key) == pytest.approx(LOWER_GAMMA[key], abs=1e-14)


@pytest.mark.parametrize("a", [0.3, 0.5, 1.0, 2.5, 4.0, 13.0, 40.0, 120.0])
@pytest.mark.parametrize("ratio", [0.01, 0.3, 0.9, 1.0, 1.2, 2.0, 4.0])
def test_lower_gamma_against_quadrature(a, ratio):
    x = a * ratio
    assert abs(regularized_lower_gamma(a, x) - quad_lower_gamma(a, x)) <= 1e-10


def test_lower_gamma_edges():
    assert regularized_lower_gamma(3.0, 0.0) == 0.0
    assert regularized_lower_gamma(3.0, math.inf) == 1.0
    with pytest.raises(NumericalDomainError):
        regularized_lower_gamma(0.0, 1.0)
    with pytest.raises(NumericalDomainError):
        regularized_lower_gamma(1.0, -1.0)


@given(st.floats(min_value=0.0, max_value=700.0))
def test_shape_one_is_exponential_cdf(x):
    assert regularized_lower_gamma(1.0, x) == pytest.approx(-math.expm1(-x), abs=1e-14)


@given(st.floats(min_value=0.05, max_value=60.0), st.floats(min_value=0.0, max_value=150.0))
def test_lower_gamma_bounded_and_monotone(a, x):
    p = regularized_lower_gamma(a, x)
    assert 0.0 <= p <= 1.0
    assert regularized_lower_gamma(a, x + 0.5) >= p - 1e-15


@given(st.floats(min_value=0.1, max_value=30.0), st.floats(min_value=0.01, max_value=60.0))
def test_lower_gamma_recurrence(a, x):
    # P(a+1, x) = P(a, x) - x^a e^-x / Gamma(a+1)
    step = math.exp(a * math.log(x) - x - math.lgamma(a + 1))
    assert regularized_lower_gamma(a + 1, x) == pytest.approx(regularized_lower_gamma(a, x) - step, abs=1e-12)


@given(st.integers(min_value=1, max_value=60), st.floats(min_value=0.0, max_value=300.0))
def test_integer_path_matches_general_path(m, x):
    fast = float(regularized_lower_gamma_int(m, x))
    assert fast == pytest.approx(regularized_lower_gamma(float(m), x), abs=1e-12)


def test_integer_path_vectorized_and_extremes():
    x = np.array([0.0, 1.0, 13.0, 1e5, np.inf])
    out = regularized_lower_gamma_int(13, x)
    assert out.shape == x.shape
    assert out[0] == 0.0 and out[-1] == 1.0 and out[-2] == 1.0
    assert out[2] == pytest.approx(LOWER_GAMMA[(13.0, 13.0)], abs=1e-14)
    with pytest.raises(NumericalDomainError):
        regularized_lower_gamma_int(2.5, 1.0)
