"""Deterministic surface-wave layer: propagation constant, guided envelope,
routing/relay matrices and the resulting average surface-wave gain."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ConfigError, DegenerateChannelError, DimensionError, NumericalDomainError

MU0 = 4.0 * math.pi * 1e-7
EPS0 = 8.8541878128e-12

Normalization = Literal["paper", "unnormalized"]

# Settled by lemma1_oracle in montecarlo.py: brute-force E|T w|^2 on the
# all-identity configuration lands on beta_BS*beta_LU*tr(.) with no 1/M.
DEFAULT_NORMALIZATION: Normalization = "unnormalized"


@dataclass(frozen=True)
class SurfaceImpedanceSpec:
    z_sur: complex
    omega: float
    mu0: float = MU0
    eps0: float = EPS0

    def __post_init__(self):
        if not (self.omega > 0 and self.mu0 > 0 and self.eps0 > 0):
            raise NumericalDomainError("omega, mu0 and eps0 must be positive")

    @classmethod
    def from_frequency_ghz(cls, z_sur: complex, freq_ghz: float) -> "SurfaceImpedanceSpec":
        return cls(z_sur=complex(z_sur), omega=2.0 * math.pi * freq_ghz * 1e9)

    @property
    def k0(self) -> float:
        """Free-space wavenumber."""
        return self.omega * math.sqrt(self.mu0 * self.eps0)


@dataclass(frozen=True)
class SurfaceWaveParams:
    """Guided-wave parameters; ``gamma = alpha + j beta``."""

    gamma: complex
    a0: complex = 1.0
    d: float = 0.0

    def __post_init__(self):
        if self.d < 0:
            raise NumericalDomainError(f"path length must be >= 0, got {self.d}")

    @classmethod
    def from_constants(cls, alpha: float, beta: float, a0: complex = 1.0, d: float = 0.0):
        return cls(gamma=complex(alpha, beta), a0=a0, d=d)

    @property
    def alpha(self) -> float:
        return self.gamma.real

    @property
    def beta(self) -> float:
        return self.gamma.imag


@dataclass(frozen=True)
class RelaySpec:
    alpha_r: complex
    u: np.ndarray
    kind: Literal["unitary", "selection"] = "unitary"

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2:
            raise DimensionError("relay matrix U must be two-dimensional")
        object.__setattr__(self, "u", u)
        if self.kind == "unitary":
            rows, cols = u.shape
            gram = u @ u.conj().T if rows <= cols else u.conj().T @ u
            if np.linalg.norm(gram - np.eye(min(rows, cols))) >= 1e-12:
                raise ConfigError("relay matrix U is not (semi-)unitary")
        elif self.kind == "selection":
            if not np.all((u == 0) | (u == 1)):
                raise ConfigError("selection matrix entries must be 0 or 1")
            if np.any(u.real.sum(axis=0) > 1) or np.any(u.real.sum(axis=1) > 1):
                raise ConfigError("selection matrix has more than one 1 per row or column")
        else:
            raise ConfigError(f"unknown relay kind {self.kind!r}")

    @classmethod
    def identity(cls, n: int, alpha_r: complex = 1.0) -> "RelaySpec":
        return cls(alpha_r=alpha_r, u=np.eye(n, dtype=complex), kind="unitary")

    @property
    def w_relay(self) -> np.ndarray:
        return self.alpha_r * self.u

    @property
    def n_l(self) -> int:
        return self.u.shape[0]

    @property
    def n_s(self) -> int:
        return self.u.shape[1]


@dataclass(frozen=True)
class SurfaceChannel:
    h_sur: np.ndarray
    g_path: np.ndarray
    h_sw_scalar: complex


def propagation_constant(spec: SurfaceImpedanceSpec) -> complex:
    """Surface-wave propagation constant from the surface impedance.

    The root is taken with non-negative real part (a passive, decaying
    wave); on the imaginary axis the root with non-negative imaginary part
    is used.
    """
    w, mu0, eps0 = spec.omega, spec.mu0, spec.eps0
    radicand = -(w * w) * mu0 * eps0 - (-1j * w * eps0 * complex(spec.z_sur)) ** 2
    gamma = cmath.sqrt(radicand)
    if gamma.real < 0 or (gamma.real == 0 and gamma.imag < 0):
        gamma = -gamma
    if not (math.isfinite(gamma.real) and math.isfinite(gamma.imag)):
        raise NumericalDomainError(f"non-finite propagation constant for omega={w}")
    return gamma


def surface_wave_envelope(params: SurfaceWaveParams) -> complex:
    a, b, d = params.alpha, params.beta, params.d
    return complex(params.a0) * math.exp(-a * d) * cmath.exp(-1j * b * d)


def build_surface_channel(params: SurfaceWaveParams, g_path: np.ndarray) -> SurfaceChannel:
    g_path = np.asarray(g_path, dtype=complex)
    if g_path.ndim != 2 or g_path.shape[0] != g_path.shape[1]:
        raise DimensionError(f"routing matrix must be square, got shape {g_path.shape}")
    if not np.all(np.isfinite(g_path)):
        raise NumericalDomainError("routing matrix has non-finite entries")
    h = surface_wave_envelope(params)
    return SurfaceChannel(h_sur=h * g_path, g_path=g_path, h_sw_scalar=h)


def omega_sw(
    beta_bs: float,
    beta_lu: float,
    h_sur: np.ndarray,
    relay: RelaySpec,
    m_antennas: int,
    normalization: Normalization = DEFAULT_NORMALIZATION,
) -> float:
    """Average power of the surface-wave-assisted channel component.

    ``normalization="paper"`` keeps the 1/M factor printed in the lemma;
    ``"unnormalized"`` is the value the layered model actually produces.
    """
    if beta_bs < 0 or beta_lu < 0:
        raise NumericalDomainError("large-scale gains must be non-negative")
    if m_antennas < 1:
        raise DimensionError("m_antennas must be positive")
    h_sur = np.asarray(h_sur, dtype=complex)
    w = relay.w_relay
    if h_sur.ndim != 2 or h_sur.shape[0] != h_sur.shape[1] or w.shape[1] != h_sur.shape[0]:
        raise DimensionError(f"relay {w.shape} and surface {h_sur.shape} not conformable")
    a = w @ h_sur
    tr = np.trace(a.conj().T @ a)
    if abs(tr.imag) > 1e-12 * max(abs(tr.real), 1e-300):
        raise NumericalDomainError("trace has a non-negligible imaginary part")
    value = beta_bs * beta_lu * float(tr.real)
    if normalization == "paper":
        return value / m_antennas
    if normalization == "unnormalized":
        return value
    raise ValueError(f"unknown normalization {normalization!r}")


def omega_eq(omega_sw_value: float, beta_dl: float) -> float:
    if omega_sw_value < 0 or beta_dl < 0:
        raise NumericalDomainError("variances must be non-negative")
    if omega_sw_value == 0 and beta_dl == 0:
        raise DegenerateChannelError("both surface-wave and direct variances are zero")
    return omega_sw_value + beta_dl


def effective_noise_variance(sigma2: float, sigma_r2: float, beta_lu: float, relay: RelaySpec) -> float:
    """Receiver noise plus relay noise averaged over the launcher-to-UE fading."""
    if not sigma2 > 0 or sigma_r2 < 0 or beta_lu < 0:
        raise NumericalDomainError("need sigma2 > 0, sigma_r2 >= 0, beta_lu >= 0")
    w = relay.w_relay
    return sigma2 + sigma_r2 * beta_lu * float(np.trace(w @ w.conj().T).real)


@dataclass(frozen=True)
class SurfaceConfig:
    """A complete deterministic surface: guided wave, routing and launcher."""

    wave: SurfaceWaveParams
    relay: RelaySpec
    g_path: np.ndarray = field(default=None)

    def __post_init__(self):
        g = self.g_path
        if g is None:
            g = np.eye(self.relay.n_s, dtype=complex)
        g = np.asarray(g, dtype=complex)
        if g.shape != (self.relay.n_s, self.relay.n_s):
            raise DimensionError(f"g_path {g.shape} does not match N_s={self.relay.n_s}")
        object.__setattr__(self, "g_path", g)

    @property
    def channel(self) -> SurfaceChannel:
        return build_surface_channel(self.wave, self.g_path)

    @property
    def h_sur(self) -> np.ndarray:
        return self.channel.h_sur

    @property
    def n_s(self) -> int:
        return self.relay.n_s

    @property
    def n_l(self) -> int:
        return self.relay.n_l

    def cascade(self) -> np.ndarray:
        """W_relay @ H_sur, the deterministic part of the surface path."""
        return self.relay.w_relay @ self.h_sur
