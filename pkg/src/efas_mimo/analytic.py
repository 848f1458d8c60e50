"""Closed-form single-user and ZF multiuser performance metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import Scenario
from .errors import InfeasibleError, NumericalDomainError, QuadratureError
from .special import EULER_GAMMA, exp_scaled_e1, ln_gamma, regularized_lower_gamma, regularized_lower_gamma_int

LN2 = math.log(2.0)

# Below this value of 1/(rho*Omega) the capacity uses the high-SNR form;
# the neglected term is about a*ln(1/a) nats, i.e. < 3e-11 bps/Hz.
CAPACITY_ASYMPTOTE_SWITCH = 1e-12


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class GammaParams:
    shape: int
    scale: float

    def __post_init__(self):
        if self.shape < 1 or not self.scale > 0:
            raise NumericalDomainError(f"invalid gamma parameters {self}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale ** 2


@dataclass(frozen=True)
class LinkBudget:
    rho: float
    omega_eq: float
    r0: float
    gamma0: float

    def __post_init__(self):
        if not (self.rho > 0 and self.omega_eq > 0 and self.r0 > 0 and self.gamma0 > 0):
            raise NumericalDomainError(f"link budget entries must be positive: {self}")
        if abs(self.gamma0 - (2.0 ** self.r0 - 1.0)) > 1e-12 * self.gamma0:
            raise NumericalDomainError("gamma0 inconsistent with r0")

    @classmethod
    def from_rate(cls, rho: float, omega_eq: float, r0: float) -> "LinkBudget":
        return cls(rho=rho, omega_eq=omega_eq, r0=r0, gamma0=2.0 ** r0 - 1.0)


def outage_probability(lb: LinkBudget) -> float:
    return -math.expm1(-lb.gamma0 / (lb.rho * lb.omega_eq))


def ergodic_capacity(rho: float, omega_eq: float) -> float:
    """E{log2(1 + rho |h|^2)} for |h|^2 ~ Exp(omega_eq), in bps/Hz."""
    if rho < 0 or omega_eq < 0:
        raise NumericalDomainError("rho and omega_eq must be non-negative")
    snr = rho * omega_eq
    if snr == 0:
        return 0.0
    a = 1.0 / snr
    if a < CAPACITY_ASYMPTOTE_SWITCH:
        return ergodic_capacity_high_snr(rho, omega_eq)
    if math.isinf(a):
        return 0.0
    return exp_scaled_e1(a) / LN2


def ergodic_capacity_high_snr(rho: float, omega_eq: float) -> float:
    return math.log2(rho * omega_eq) - EULER_GAMMA / LN2


def _ratio(scn: Scenario) -> float:
    return scn.p_total / (scn.k_users * float(scn.sigma_eff2()[0]))


def _check_zf(scn: Scenario) -> None:
    if scn.k_users > scn.m_antennas:
        raise InfeasibleError(f"ZF needs K <= M, got K={scn.k_users}, M={scn.m_antennas}")


def zf_sinr_params(scn: Scenario, omega_eq: float) -> GammaParams:
    _check_zf(scn)
    return GammaParams(shape=scn.m_antennas - scn.k_users + 1, scale=_ratio(scn) * omega_eq)


def gamma_pdf(x, gp: GammaParams):
    x = np.asarray(x, dtype=float)
    m, th = gp.shape, gp.scale
    with np.errstate(divide="ignore", invalid="ignore"):
        log_pdf = (m - 1) * np.log(x) - x / th - ln_gamma(m) - m * math.log(th)
    out = np.exp(log_pdf)
    if m == 1:
        out = np.where(x == 0, 1.0 / th, out)
    out = np.where(x < 0, 0.0, out)
    return out if out.ndim else float(out)


def gamma_cdf(x, gp: GammaParams):
    x = np.asarray(x, dtype=float)
    z = np.clip(x, 0.0, None) / gp.scale
    if float(gp.shape).is_integer():
        out = regularized_lower_gamma_int(gp.shape, z)
    else:
        out = np.vectorize(lambda v: regularized_lower_gamma(gp.shape, v))(z)
    return out if out.ndim else float(out)


def zf_sum_rate_approx(scn: Scenario, omega_eq: float) -> float:
    """Sum rate with each user's SINR replaced by its mean (a Jensen upper bound)."""
    _check_zf(scn)
    m = scn.m_antennas - scn.k_users + 1
    return scn.k_users * math.log2(1.0 + m * _ratio(scn) * omega_eq)


def expected_log2_gamma(gp: GammaParams, tol: float = 1e-7) -> float:
    """E{log2(1 + X)} for X ~ Gamma(shape, scale) by adaptive quadrature."""
    mean, sd = gp.mean, math.sqrt(gp.variance)

    def integrand(x):
        return math.log2(1.0 + x) * gamma_pdf(x, gp)

    # break points around the bulk so QUADPACK sees the peak
    pts = sorted({0.0, max(mean - 6 * sd, 0.0), mean, mean + 6 * sd, mean + 40 * sd})
    total, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            val, e = integrate.quad(integrand, lo, hi, epsabs=tol / 10, epsrel=1e-12, limit=400)
            total += val
            err += e
    val, e = integrate.quad(integrand, pts[-1], math.inf, epsabs=tol / 10, limit=400)
    total += val
    err += e
    if not math.isfinite(total) or err > tol:
        raise QuadratureError(f"quadrature error {err:.3e} exceeds {tol:.1e} for {gp}")
    return total


def zf_sum_rate_exact(scn: Scenario, omega_eq: float) -> float:
    """K * E{log2(1 + SINR)} under the ZF gamma law, to about 1e-6 bps/Hz."""
    _check_zf(scn)
    if omega_eq == 0 or scn.p_total == 0:
        return 0.0
    gp = zf_sinr_params(scn, omega_eq)
    return scn.k_users * expected_log2_gamma(gp, tol=1e-6 / scn.k_users)
