"""Special functions used by the closed-form performance expressions.

E1 uses its power series for ``x <= 1`` and a modified-Lentz continued
fraction above that. The regularized lower incomplete gamma function uses
the series for ``x < a + 1`` and the complementary continued fraction
otherwise, with an exact finite Poisson sum for integer shapes.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericalDomainError, NumericalError

EULER_GAMMA = 0.5772156649015329

E1_SERIES_CROSSOVER = 1.0

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 100_000


def _e1_series(x: float) -> float:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x: float) -> float:
    """exp(x) * E1(x) by continued fraction, valid for x > 1."""
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NumericalError(f"E1 continued fraction did not converge at x={x}")


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise NumericalDomainError(f"E1 requires finite x > 0, got {x}")
    if x <= E1_SERIES_CROSSOVER:
        return _e1_series(x)
    return _e1_scaled_cf(x) * math.exp(-x)


def exp_scaled_e1(x: float) -> float:
    """exp(x) * E1(x); stays finite where exp(x) alone would overflow."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise NumericalDomainError(f"E1 requires finite x > 0, got {x}")
    if x <= E1_SERIES_CROSSOVER:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise NumericalDomainError(f"ln_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def _lower_gamma_series(a: float, x: float) -> float:
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(_MAX_ITER):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericalError(f"incomplete gamma series did not converge at a={a}, x={x}")


def _upper_gamma_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NumericalError(f"incomplete gamma fraction did not converge at a={a}, x={x}")


def _check_gamma_args(shape: float, x: float) -> None:
    if not shape > 0.0 or not math.isfinite(shape):
        raise NumericalDomainError(f"shape must be finite and > 0, got {shape}")
    if not x >= 0.0:
        raise NumericalDomainError(f"x must be >= 0, got {x}")


def regularized_lower_gamma(shape: float, x: float) -> float:
    """P(shape, x) = lower incomplete gamma / Gamma(shape)."""
    shape = float(shape)
    x = float(x)
    _check_gamma_args(shape, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < shape + 1.0:
        return min(1.0, _lower_gamma_series(shape, x))
    return max(0.0, 1.0 - _upper_gamma_cf(shape, x))


def _poisson_log_mass(k: np.ndarray, x: np.ndarray, log_x: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = k * log_x - x - np.array([math.lgamma(v + 1.0) for v in k.ravel()]).reshape(k.shape)
    return np.where(k == 0, -x, out)


def regularized_lower_gamma_int(shape: int, x):
    """Integer-shape fast path via Poisson sums, vectorized over ``x``.

    P(m, x) = Pr{Poisson(x) >= m}. Below the mean the upper Poisson tail is
    summed directly (keeps relative accuracy deep in the left tail); above
    it, 1 minus the lower Poisson sum.
    """
    if int(shape) != shape or shape < 1:
        raise NumericalDomainError(f"integer fast path needs shape >= 1, got {shape}")
    m = int(shape)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise NumericalDomainError("x must be >= 0")
    with np.errstate(divide="ignore"):
        log_x = np.log(x)
    left = x < m
    out = np.empty_like(x)

    xl, lx = x[left][:, None], log_x[left][:, None]
    # terms beyond m + 10 sqrt(m) + 40 are below 1e-20 of the leading one for x < m
    k = np.arange(m, m + int(10 * math.sqrt(m)) + 40, dtype=float)[None, :]
    with np.errstate(under="ignore"):
        out[left] = np.exp(_poisson_log_mass(k, xl, lx)).sum(axis=1)

    xr, lx = x[~left][:, None], log_x[~left][:, None]
    k = np.arange(m, dtype=float)[None, :]
    with np.errstate(under="ignore"):
        out[~left] = 1.0 - np.exp(_poisson_log_mass(k, xr, lx)).sum(axis=1)

    out = np.where(x == 0, 0.0, out)
    out = np.where(np.isinf(x), 1.0, out)
    return np.clip(out, 0.0, 1.0)
