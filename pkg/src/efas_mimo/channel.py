"""Scenario description and all random channel sampling.

Sampling functions draw a whole batch of trials at once from a
:class:`~efas_mimo.streams.TrialStream`; the leading axis of every returned
array is the trial axis.
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import ConfigError, DimensionError, InfeasibleError
from .streams import TrialStream
from .surface import (
    DEFAULT_NORMALIZATION,
    Normalization,
    SurfaceConfig,
    effective_noise_variance,
    omega_eq,
    omega_sw,
)


def _as_user_vector(value, k: int, name: str) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.repeat(arr, k)
    if arr.shape != (k,):
        raise ConfigError(f"{name} must have length K={k}, got {arr.shape}")
    if np.any(arr < 0):
        raise ConfigError(f"{name} must be non-negative")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class Scenario:
    """One downlink operating point.

    Per-user gains may be given as scalars and are broadcast to length K.
    Exactly one of ``surface`` and ``omega_sw_override`` must be set.
    """

    m_antennas: int = 16
    k_users: int = 4
    n_s: int = 8
    n_l: int = 8
    p_total: float = 10.0
    sigma2: float = 1.0
    sigma_r2: float = 0.0
    beta_bs: float = 1.0
    beta_lu: tuple[float, ...] = (1.0,)
    beta_dl: tuple[float, ...] = (0.01,)
    surface: Optional[SurfaceConfig] = None
    omega_sw_override: Optional[float] = None
    precoding: Literal["isotropic", "zf"] = "zf"
    normalization: Normalization = DEFAULT_NORMALIZATION
    fixed_precoder: bool = False

    def __post_init__(self):
        if self.m_antennas < 1 or self.k_users < 1 or self.n_s < 1 or self.n_l < 1:
            raise ConfigError("array sizes must be positive integers")
        if self.p_total < 0 or not self.sigma2 > 0 or self.sigma_r2 < 0 or self.beta_bs < 0:
            raise ConfigError("need p_total >= 0, sigma2 > 0, sigma_r2 >= 0, beta_bs >= 0")
        object.__setattr__(self, "beta_lu", _as_user_vector(self.beta_lu, self.k_users, "beta_lu"))
        object.__setattr__(self, "beta_dl", _as_user_vector(self.beta_dl, self.k_users, "beta_dl"))
        if (self.surface is None) == (self.omega_sw_override is None):
            raise ConfigError("exactly one of surface / omega_sw_override must be given")
        if self.omega_sw_override is not None and self.omega_sw_override < 0:
            raise ConfigError("omega_sw_override must be >= 0")
        if self.surface is not None and (self.surface.n_s, self.surface.n_l) != (self.n_s, self.n_l):
            raise DimensionError(
                f"surface is {self.surface.n_l}x{self.surface.n_s} but scenario says "
                f"N_L={self.n_l}, N_s={self.n_s}"
            )
        if self.precoding == "zf" and self.k_users > self.m_antennas:
            raise InfeasibleError(f"ZF needs K <= M, got K={self.k_users}, M={self.m_antennas}")
        if self.precoding not in ("isotropic", "zf"):
            raise ConfigError(f"unknown precoding {self.precoding!r}")

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def with_users(self, k: int, **changes) -> "Scenario":
        """Same scenario with ``k`` users; only valid for symmetric gains."""
        if len(set(self.beta_lu)) > 1 or len(set(self.beta_dl)) > 1:
            raise ConfigError("cannot change K of an asymmetric scenario")
        return self.replace(k_users=k, beta_lu=self.beta_lu[:1], beta_dl=self.beta_dl[:1], **changes)

    def omega_sw(self) -> np.ndarray:
        if self.omega_sw_override is not None:
            return np.full(self.k_users, float(self.omega_sw_override))
        s = self.surface
        return np.array([
            omega_sw(self.beta_bs, blu, s.h_sur, s.relay, self.m_antennas, self.normalization)
            for blu in self.beta_lu
        ])

    def omega_eq(self) -> np.ndarray:
        return np.array([omega_eq(sw, dl) for sw, dl in zip(self.omega_sw(), self.beta_dl)])

    def sigma_eff2(self) -> np.ndarray:
        if self.surface is None:
            return np.full(self.k_users, float(self.sigma2))
        return np.array([
            effective_noise_variance(self.sigma2, self.sigma_r2, blu, self.surface.relay)
            for blu in self.beta_lu
        ])

    @property
    def rho(self) -> float:
        """Effective SNR P / sigma_eff^2 of the first user."""
        return self.p_total / float(self.sigma_eff2()[0])

    def with_snr_db(self, snr_db: float) -> "Scenario":
        """Set P so that P / sigma_eff^2 of the first user equals ``snr_db``."""
        return self.replace(p_total=10.0 ** (snr_db / 10.0) * float(self.sigma_eff2()[0]))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "surface" and value is not None:
                h.update(repr((value.wave, value.relay.alpha_r, value.relay.kind)).encode())
                h.update(value.relay.u.tobytes())
                h.update(value.g_path.tobytes())
            else:
                h.update(f"{f.name}={value!r};".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class ChannelRealization:
    """A batch of layered-model draws (leading axis = trial).

    ``g_relay_ue`` and ``g_dl`` hold the unit-variance fading; the scaled
    channels are exposed as ``h_relay_ue`` and ``h_dl``.
    """

    h_bs_sur: np.ndarray      # (n, N_s, M), variance beta_BS
    g_relay_ue: np.ndarray    # (n, K, N_L), CN(0, 1)
    g_dl: np.ndarray          # (n, K, M), CN(0, 1)
    beta_lu: np.ndarray
    beta_dl: np.ndarray

    @property
    def h_relay_ue(self) -> np.ndarray:
        return np.sqrt(self.beta_lu)[None, :, None] * self.g_relay_ue

    @property
    def h_dl(self) -> np.ndarray:
        return np.sqrt(self.beta_dl)[None, :, None] * self.g_dl


@dataclass(frozen=True)
class EquivalentChannelMatrix:
    h_eq: np.ndarray        # (n, M, K)
    omega_eq: np.ndarray    # (K,)


def complex_gaussian_matrix(rows: int, cols: int, variance: float, rng: TrialStream,
                            tag: str = "matrix") -> np.ndarray:
    """Batch of ``rows x cols`` matrices with i.i.d. CN(0, variance) entries."""
    if variance < 0:
        raise ConfigError("variance must be >= 0")
    return rng.complex_normal(tag, (rows, cols), variance)


def isotropic_unit_vector(m: int, rng: TrialStream, tag: str = "w") -> np.ndarray:
    """Batch of unit vectors uniform on the complex sphere in C^m."""
    if m < 1:
        raise ConfigError("m must be >= 1")
    g = rng.complex_normal(tag, (m,))
    norms = np.linalg.norm(g, axis=1)
    attempt = 0
    while np.any(norms == 0):
        # probability-zero event; redraw only the affected trials
        attempt += 1
        for i in np.flatnonzero(norms == 0):
            t = rng.start + int(i)
            g[i] = rng.span(t, t + 1).complex_normal(f"{tag}/redraw{attempt}", (m,))[0]
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def sample_layered_channel(scn: Scenario, rng: TrialStream) -> ChannelRealization:
    if scn.surface is None:
        raise ConfigError("layered sampling needs a surface specification")
    return ChannelRealization(
        h_bs_sur=rng.complex_normal("h_bs_sur", (scn.n_s, scn.m_antennas), scn.beta_bs),
        g_relay_ue=rng.complex_normal("g_relay_ue", (scn.k_users, scn.n_l)),
        g_dl=rng.complex_normal("g_dl", (scn.k_users, scn.m_antennas)),
        beta_lu=np.asarray(scn.beta_lu),
        beta_dl=np.asarray(scn.beta_dl),
    )


def sample_precoders(scn: Scenario, rng: TrialStream) -> np.ndarray:
    """Isotropic precoders, redrawn per trial unless ``scn.fixed_precoder``."""
    if scn.fixed_precoder:
        w = isotropic_unit_vector(scn.m_antennas, TrialStream(rng.seed, rng.label), tag="w-fixed")
        return np.broadcast_to(w, (rng.n_trials, scn.m_antennas))
    return isotropic_unit_vector(scn.m_antennas, rng)


def surface_row(real: ChannelRealization, scn: Scenario, user: int) -> np.ndarray:
    """T_u = h_relay-UE,u W_relay H_sur H_BS-sur for every trial, shape (n, M)."""
    if scn.surface is None:
        raise ConfigError("surface path needs a surface specification")
    cascade = scn.surface.cascade()                       # (N_L, N_s)
    if real.h_bs_sur.shape[1:] != (cascade.shape[1], scn.m_antennas):
        raise DimensionError("realization does not match the scenario dimensions")
    lead = real.h_relay_ue[:, user, :] @ cascade          # (n, N_s)
    return np.matmul(lead[:, None, :], real.h_bs_sur)[:, 0, :]


def equivalent_coefficient(real: ChannelRealization, scn: Scenario, w: np.ndarray,
                           user: int) -> np.ndarray:
    """End-to-end scalar channel of ``user`` along precoder ``w``, per trial."""
    w = np.asarray(w)
    if w.ndim == 1:
        w = np.broadcast_to(w, (real.h_bs_sur.shape[0], w.shape[0]))
    if w.shape[1] != scn.m_antennas:
        raise DimensionError(f"precoder length {w.shape[1]} != M={scn.m_antennas}")
    t = surface_row(real, scn, user)
    direct = real.h_dl[:, user, :]
    return np.sum(t * w, axis=1) + np.sum(direct * w, axis=1)


def sample_equivalent_matrix(scn: Scenario, omega_eq: np.ndarray, rng: TrialStream) -> EquivalentChannelMatrix:
    """Direct draw of H_eq with column u i.i.d. CN(0, omega_eq[u])."""
    omega_eq = np.asarray(omega_eq, dtype=float)
    if omega_eq.shape != (scn.k_users,):
        raise DimensionError(f"omega_eq must have length K={scn.k_users}")
    if np.any(omega_eq < 0):
        raise ConfigError("omega_eq must be non-negative")
    g = rng.complex_normal("h_eq", (scn.m_antennas, scn.k_users))
    return EquivalentChannelMatrix(h_eq=g * np.sqrt(omega_eq)[None, None, :], omega_eq=omega_eq)
