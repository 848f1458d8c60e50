"""Trial-parallel Monte-Carlo estimators and brute-force oracles.

Trials are split into fixed-size batches; each batch reads its own slice of
the counter-based streams, so per-trial values do not depend on the batch
size or the number of workers. Per-trial values are concatenated in trial
order before any reduction, which makes every estimate bit-reproducible.
"""
from __future__ import annotations

import functools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .channel import (
    Scenario,
    equivalent_coefficient,
    sample_equivalent_matrix,
    sample_layered_channel,
    sample_precoders,
    surface_row,
)
from .errors import ConfigError, InfeasibleError, SingularChannelError
from .stats import MonteCarloEstimate, mean_confidence_interval
from .streams import TrialStream
from .surface import omega_sw

log = logging.getLogger(__name__)

CONDITION_CAP = 1e10
MAX_SINGULAR_FRACTION = 1e-3
DEFAULT_BATCH = 4096


@dataclass(frozen=True)
class MCSettings:
    seed: int = 0
    workers: int = 1
    batch: int = DEFAULT_BATCH
    confidence: float = 0.95

    def stream(self, label: str) -> TrialStream:
        return TrialStream(self.seed, label)


@dataclass(frozen=True)
class SinrSampleSet:
    samples: np.ndarray
    fingerprint: str
    seed: int
    resampled: int = 0


@dataclass(frozen=True)
class Lemma1Record:
    empirical_mean_power: float
    std_err: float
    n: int
    paper_value: float
    unnormalized_value: float
    verdict: Literal["paper", "unnormalized", "both", "inconclusive"]


def _call_span(kernel: Callable, root: TrialStream, bounds: tuple[int, int]):
    return kernel(root.span(*bounds))


def run_trials(kernel: Callable[[TrialStream], dict], trials: int, root: TrialStream,
               settings: MCSettings) -> dict[str, np.ndarray]:
    """Evaluate ``kernel`` over trials ``[0, trials)`` and concatenate in trial order."""
    if trials < 1:
        raise ConfigError("need at least one trial")
    if settings.batch < 1 or settings.workers < 1:
        raise ConfigError("batch and workers must be positive")
    bounds = [(s, min(s + settings.batch, trials)) for s in range(0, trials, settings.batch)]
    job = functools.partial(_call_span, kernel, root)
    if settings.workers == 1 or len(bounds) == 1:
        parts = [job(b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            parts = list(pool.map(job, bounds))
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _label(op: str, scn: Scenario, *extra) -> str:
    return "|".join([op, scn.fingerprint(), *map(repr, extra)])


# ---------------------------------------------------------------- ZF helpers

def _condition_numbers(h: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(h, compute_uv=False)
    with np.errstate(divide="ignore"):
        return s[..., 0] / s[..., -1]


def _well_conditioned(h: np.ndarray, cap: float = CONDITION_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Mask of draws with cond(H) <= cap, plus the Gram inverses.

    ||G||_F ||G^-1||_F bounds cond(G) = cond(H)^2 from above, so draws under
    the cap by that bound need no SVD; only the rest get the exact test.
    """
    gram = np.matmul(h.conj().swapaxes(-1, -2), h)
    try:
        ginv = np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        ginv = np.stack([_safe_inv(g) for g in gram])
    with np.errstate(over="ignore", invalid="ignore"):
        bound = np.linalg.norm(gram, axis=(-2, -1)) * np.linalg.norm(ginv, axis=(-2, -1))
    ok = bound <= cap * cap
    unsure = np.flatnonzero(~ok)
    if unsure.size:
        ok[unsure] = _condition_numbers(h[unsure]) <= cap
    return ok, ginv


def _safe_inv(g: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.inv(g)
    except np.linalg.LinAlgError:
        return np.full_like(g, np.nan)


def _zf_batch(h: np.ndarray, ginv: np.ndarray | None = None) -> np.ndarray:
    if ginv is None:
        ginv = np.linalg.inv(np.matmul(h.conj().swapaxes(-1, -2), h))
    w = np.matmul(h, ginv)                                  # W = H (H^H H)^-1
    return w / np.linalg.norm(w, axis=-2, keepdims=True)


def zf_precoder(h_eq: np.ndarray, condition_cap: float = CONDITION_CAP) -> np.ndarray:
    """Column-normalized zero-forcing precoder for an M x K channel."""
    h_eq = np.asarray(h_eq, dtype=complex)
    m, k = h_eq.shape
    if k > m:
        raise InfeasibleError(f"ZF needs K <= M, got {h_eq.shape}")
    if not np.isfinite(_condition_numbers(h_eq)) or _condition_numbers(h_eq) > condition_cap:
        raise SingularChannelError("channel is rank deficient or above the condition cap")
    return _zf_batch(h_eq)


def _draw_zf_channels(scn: Scenario, omega: np.ndarray, stream: TrialStream):
    h = sample_equivalent_matrix(scn, omega, stream).h_eq
    retries = np.zeros(stream.n_trials, dtype=np.int64)
    ok, ginv = _well_conditioned(h)
    attempt = 0
    while not np.all(ok):
        attempt += 1
        if attempt > 20:
            raise SingularChannelError("channel draws stay singular after 20 resamples")
        bad = np.flatnonzero(~ok)
        for i in bad:
            t = stream.start + int(i)
            sub = stream.span(t, t + 1).child(f"resample{attempt}")
            h[i] = sample_equivalent_matrix(scn, omega, sub).h_eq[0]
            retries[i] += 1
        ok[bad], ginv[bad] = _well_conditioned(h[bad])
    return h, ginv, retries


def _zf_kernel(scn: Scenario, omega: np.ndarray, stream: TrialStream) -> dict:
    h, ginv, retries = _draw_zf_channels(scn, omega, stream)
    w = _zf_batch(h, ginv)
    cross = np.matmul(h.conj().swapaxes(-1, -2), w)          # [u, i] = h_u^H w_i
    signal = np.abs(np.diagonal(cross, axis1=-2, axis2=-1)) ** 2
    sinr = (scn.p_total / scn.k_users) * signal / scn.sigma_eff2()[None, :]
    off = np.abs(cross) ** 2
    off[..., np.arange(scn.k_users), np.arange(scn.k_users)] = 0.0
    leak = off.sum(axis=-1) / signal
    return {"sinr": sinr, "retries": retries, "residual": leak.mean(axis=-1)}


def _check_singular_rate(retries: np.ndarray, trials: int) -> int:
    n = int(np.count_nonzero(retries))
    if n > MAX_SINGULAR_FRACTION * trials:
        raise ConfigError(f"{n} of {trials} channel draws were singular; check the configuration")
    if n:
        log.info("resampled %d singular channel draws out of %d", n, trials)
    return n


def _zf_run(scn: Scenario, omega_eq, trials: int, rng: MCSettings, op: str) -> dict:
    if scn.k_users > scn.m_antennas:
        raise InfeasibleError(f"ZF needs K <= M, got K={scn.k_users}, M={scn.m_antennas}")
    omega = np.broadcast_to(np.asarray(omega_eq, dtype=float), (scn.k_users,)).copy()
    kernel = functools.partial(_zf_kernel, scn, omega)
    out = run_trials(kernel, trials, rng.stream(_label(op, scn, omega.tolist())), rng)
    out["n_resampled"] = _check_singular_rate(out["retries"], trials)
    return out


def sample_zf_sinr(scn: Scenario, omega_eq, trials: int, rng: MCSettings) -> SinrSampleSet:
    """Post-ZF SINR of the first user over ``trials`` channel draws."""
    out = _zf_run(scn, omega_eq, trials, rng, "zf-sinr")
    return SinrSampleSet(samples=out["sinr"][:, 0], fingerprint=scn.fingerprint(),
                         seed=rng.seed, resampled=out["n_resampled"])


def simulate_sum_rate(scn: Scenario, omega_eq, trials: int, rng: MCSettings) -> MonteCarloEstimate:
    out = _zf_run(scn, omega_eq, trials, rng, "zf-sum-rate")
    per_trial = np.log2(1.0 + out["sinr"]).sum(axis=1)
    return mean_confidence_interval(per_trial, rng.confidence)


def interference_residuals(scn: Scenario, trials: int, rng: MCSettings) -> np.ndarray:
    """Per-trial leakage sum_{i!=u} |h_u^H w_i|^2 / |h_u^H w_u|^2, averaged over users."""
    return _zf_run(scn, scn.omega_eq(), trials, rng, "zf-residual")["residual"]


def interference_residual(scn: Scenario, trials: int, rng: MCSettings) -> MonteCarloEstimate:
    return mean_confidence_interval(interference_residuals(scn, trials, rng), rng.confidence)


def residual_of(h_eq: np.ndarray) -> float:
    """Normalized inter-user leakage of column-normalized ZF on one channel matrix."""
    h_eq = np.asarray(h_eq, dtype=complex)
    w = _zf_batch(h_eq)
    cross = h_eq.conj().T @ w
    signal = np.abs(np.diag(cross)) ** 2
    off = np.abs(cross) ** 2
    np.fill_diagonal(off, 0.0)
    return float(np.mean(off.sum(axis=1) / signal))


# ------------------------------------------------------------- single user

def _single_user_kernel(scn: Scenario, stream: TrialStream) -> dict:
    if scn.surface is not None:
        real = sample_layered_channel(scn, stream)
        w = sample_precoders(scn, stream)
        h = equivalent_coefficient(real, scn, w, 0)
    else:
        h = stream.complex_normal("h_eq", (1,), float(scn.omega_eq()[0]))[:, 0]
    return {"h": h}


def _check_single_user(scn: Scenario) -> None:
    if scn.k_users != 1 or scn.precoding != "isotropic":
        raise ConfigError("single-user simulations need K = 1 and isotropic precoding")


def sample_single_user_channel(scn: Scenario, trials: int, rng: MCSettings) -> np.ndarray:
    """End-to-end coefficients h_eq of user 1 under isotropic precoding."""
    kernel = functools.partial(_single_user_kernel, scn)
    return run_trials(kernel, trials, rng.stream(_label("single-user", scn)), rng)["h"]


def layered_coefficients(scn: Scenario, trials: int, rng: MCSettings, user: int = 0) -> np.ndarray:
    """h_eq of ``user`` drawn through the full layered model (any K)."""
    if scn.surface is None:
        raise ConfigError("layered sampling needs a surface specification")
    kernel = functools.partial(_layered_kernel, scn, user)
    return run_trials(kernel, trials, rng.stream(_label("layered", scn, user)), rng)["h"]


def _layered_kernel(scn: Scenario, user: int, stream: TrialStream) -> dict:
    real = sample_layered_channel(scn, stream)
    w = sample_precoders(scn, stream)
    return {"h": equivalent_coefficient(real, scn, w, user)}


def simulate_outage(scn: Scenario, r0: float, trials: int, rng: MCSettings) -> MonteCarloEstimate:
    _check_single_user(scn)
    gain = np.abs(sample_single_user_channel(scn, trials, rng)) ** 2
    outage = (np.log2(1.0 + scn.rho * gain) < r0).astype(float)
    return mean_confidence_interval(outage, rng.confidence)


def simulate_capacity(scn: Scenario, trials: int, rng: MCSettings) -> MonteCarloEstimate:
    _check_single_user(scn)
    gain = np.abs(sample_single_user_channel(scn, trials, rng)) ** 2
    return mean_confidence_interval(np.log2(1.0 + scn.rho * gain), rng.confidence)


# ---------------------------------------------------------------- oracles

def _surface_power_kernel(scn: Scenario, stream: TrialStream) -> dict:
    real = sample_layered_channel(scn, stream)
    w = sample_precoders(scn, stream)
    t = surface_row(real, scn, 0)
    return {"p": np.abs(np.sum(t * w, axis=1)) ** 2}


def lemma1_oracle(scn: Scenario, trials: int, rng: MCSettings, n_se: float = 3.0) -> Lemma1Record:
    """Brute-force E|T_u w|^2 compared with both trace normalizations."""
    if scn.surface is None:
        raise ConfigError("the oracle needs a surface specification")
    kernel = functools.partial(_surface_power_kernel, scn)
    p = run_trials(kernel, trials, rng.stream(_label("lemma1", scn)), rng)["p"]
    est = mean_confidence_interval(p, rng.confidence)
    s = scn.surface
    values = {
        norm: omega_sw(scn.beta_bs, scn.beta_lu[0], s.h_sur, s.relay, scn.m_antennas, norm)
        for norm in ("paper", "unnormalized")
    }
    hits = [norm for norm, v in values.items() if est.within(v, n_se)]
    verdict = {0: "inconclusive", 1: hits[0] if hits else "inconclusive", 2: "both"}[len(hits)]
    return Lemma1Record(
        empirical_mean_power=est.mean,
        std_err=est.std_err,
        n=est.n,
        paper_value=values["paper"],
        unnormalized_value=values["unnormalized"],
        verdict=verdict,
    )


def condition_study(h_eq: np.ndarray) -> tuple[float, float]:
    """(condition number, leakage) for one channel matrix; used to log near-singular draws."""
    kappa = float(_condition_numbers(np.asarray(h_eq, dtype=complex)))
    res = residual_of(h_eq)
    log.info("condition number %.3e gives ZF leakage %.3e", kappa, res)
    return kappa, res


def beamforming_capacity(scn: Scenario, trials: int, rng: MCSettings) -> MonteCarloEstimate:
    """Single-user rate along w = h / ||h|| on the equivalent channel (K = 1 ZF)."""
    if scn.k_users != 1:
        raise ConfigError("beamforming capacity is a single-user quantity")
    return simulate_sum_rate(scn, scn.omega_eq(), trials, rng)

