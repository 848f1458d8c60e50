"""Run configuration: defaults, flat ``key = value`` files and overrides."""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channel import Scenario
from .errors import ConfigError
from .montecarlo import DEFAULT_BATCH, MCSettings
from .surface import DEFAULT_NORMALIZATION, RelaySpec, SurfaceConfig, SurfaceWaveParams

# keys that change how a run executes but never what it computes
EXECUTION_KEYS = ("workers", "batch", "output_path")


@dataclass
class RunConfig:
    seed: int = 1
    trials: Optional[int] = None          # overrides both counts below when set
    trials_single: int = 1_000_000
    trials_multi: int = 100_000
    trials_residual: int = 10_000
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    batch: int = DEFAULT_BATCH
    confidence: float = 0.95
    output_path: Optional[str] = None

    m_antennas: int = 16
    k_users: int = 4
    n_s: int = 8
    n_l: int = 8
    snr_db: float = 10.0
    r0: float = 1.0
    sigma2: float = 1.0
    sigma_r2: float = 0.0
    beta_bs: float = 1.0
    beta_lu: float = 1.0
    beta_dl: float = 0.01
    omega_sw: float = 5.0
    normalization: str = DEFAULT_NORMALIZATION

    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    omega_sw_list: tuple[float, ...] = (0.0, 1.0, 5.0, 10.0)
    k_grid: tuple[int, ...] = tuple(range(1, 17))
    m_grid: tuple[int, ...] = (16, 24, 32)
    bins: int = 100

    # physical surface used by physical-omega and the layered validation checks
    z_sur: complex = complex(100.0, 100.0)
    freq_ghz: float = 30.0
    a0: complex = complex(1.0, 0.0)
    alpha_r: complex = complex(1.0, 0.0)
    d_grid: tuple[float, ...] = (0.0, 0.005, 0.01, 0.02, 0.05)
    lemma_m: int = 4

    def __post_init__(self):
        for name in ("snr_grid_db", "omega_sw_list", "d_grid"):
            setattr(self, name, tuple(float(v) for v in getattr(self, name)))
        for name in ("k_grid", "m_grid"):
            setattr(self, name, tuple(int(v) for v in getattr(self, name)))
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.trials is not None and self.trials < 2:
            raise ConfigError("trials must be >= 2")
        if not 0 < self.confidence < 1:
            raise ConfigError("confidence must lie in (0, 1)")
        if self.normalization not in ("paper", "unnormalized"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")

    @property
    def n_single(self) -> int:
        return self.trials if self.trials is not None else self.trials_single

    @property
    def n_multi(self) -> int:
        return self.trials if self.trials is not None else self.trials_multi

    @property
    def n_residual(self) -> int:
        return self.trials if self.trials is not None else self.trials_residual

    def settings(self) -> MCSettings:
        return MCSettings(seed=self.seed, workers=self.workers, batch=self.batch,
                          confidence=self.confidence)

    @property
    def scenario(self) -> Scenario:
        """Multiuser ZF scenario with the Omega_sw override, at ``snr_db``."""
        return self.override_scenario(self.omega_sw)

    def override_scenario(self, omega_sw: float, k_users: Optional[int] = None,
                          precoding: str = "zf") -> Scenario:
        return Scenario(
            m_antennas=self.m_antennas,
            k_users=self.k_users if k_users is None else k_users,
            n_s=self.n_s, n_l=self.n_l,
            sigma2=self.sigma2, sigma_r2=self.sigma_r2,
            beta_bs=self.beta_bs, beta_lu=self.beta_lu, beta_dl=self.beta_dl,
            omega_sw_override=omega_sw, precoding=precoding,
            normalization=self.normalization,
        ).with_snr_db(self.snr_db)

    def identity_surface_scenario(self) -> Scenario:
        """Single-user layered scenario with H_sur = I and W_relay = alpha_r I."""
        surface = SurfaceConfig(
            wave=SurfaceWaveParams(gamma=0j, a0=1.0, d=0.0),
            relay=RelaySpec.identity(self.n_s, self.alpha_r) if self.n_s == self.n_l
            else RelaySpec(self.alpha_r, np.eye(self.n_l, self.n_s), "selection"),
        )
        return Scenario(
            m_antennas=self.lemma_m, k_users=1, n_s=self.n_s, n_l=self.n_l,
            sigma2=self.sigma2, sigma_r2=self.sigma_r2,
            beta_bs=self.beta_bs, beta_lu=self.beta_lu, beta_dl=self.beta_dl,
            surface=surface, precoding="isotropic", normalization=self.normalization,
        ).with_snr_db(self.snr_db)

    def resolved_items(self) -> list[tuple[str, str]]:
        """Every result-affecting key with its value, sorted by key."""
        return sorted(
            (f.name, format_value(getattr(self, f.name)))
            for f in dataclasses.fields(self)
            if f.name not in EXECUTION_KEYS
        )


def format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(format_value(v) for v in value)
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


def _parse(name: str, text: str, default):
    text = text.strip()
    try:
        if name == "trials" or name == "output_path":
            if text.lower() in ("", "none"):
                return None
            return int(float(text)) if name == "trials" else text
        if isinstance(default, tuple):
            kind = int if name in ("k_grid", "m_grid") else float
            return tuple(kind(float(v)) if kind is int else kind(v) for v in text.split(",") if v.strip())
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(float(text)) if "e" in text.lower() else int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, complex):
            return complex(text.replace(" ", ""))
        return text
    except ValueError as exc:
        raise ConfigError(f"cannot parse {name}={text!r}: {exc}") from None


def apply_overrides(cfg: RunConfig, items: dict[str, str]) -> RunConfig:
    defaults = {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
    changes = {}
    for key, text in items.items():
        key = key.strip().replace("-", "_")
        if key not in defaults:
            raise ConfigError(f"unknown configuration key {key!r}")
        reference = defaults[key]
        if reference is None:
            reference = RunConfig.__dataclass_fields__[key].default
        changes[key] = _parse(key, text, reference)
    return dataclasses.replace(cfg, **changes)


def read_config_file(path: str | Path) -> dict[str, str]:
    items = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        items[key.strip()] = value.strip()
    return items


def load_config(path: Optional[str] = None, overrides: Optional[dict[str, str]] = None) -> RunConfig:
    """Defaults, then the config file, then explicit overrides (which win)."""
    cfg = RunConfig()
    if path:
        try:
            cfg = apply_overrides(cfg, read_config_file(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg
