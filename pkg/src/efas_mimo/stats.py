"""Empirical distribution tools: ECDF, histogram density, KS distance and
normal-approximation confidence intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable

import numpy as np

from .errors import ConfigError

KS_CRITICAL_1PCT = 1.63
KS_CRITICAL_5PCT = 1.36
KS_MARGIN = 1.5


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_err: float
    n: int
    ci_low: float
    ci_high: float

    def within(self, value: float, n_se: float = 3.0) -> bool:
        """True when ``value`` is inside ``n_se`` standard errors of the mean."""
        return abs(self.mean - value) <= n_se * self.std_err

    def z_score(self, value: float) -> float:
        diff = self.mean - value
        if self.std_err == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.std_err


@dataclass(frozen=True)
class Ecdf:
    sorted_samples: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, samples) -> "Ecdf":
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        if s.size < 1:
            raise ConfigError("ECDF needs at least one sample")
        return cls(sorted_samples=s, n=int(s.size))


@dataclass(frozen=True)
class HistogramDensity:
    bin_edges: np.ndarray
    densities: np.ndarray

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


def ecdf_eval(e: Ecdf, x):
    """Fraction of samples <= x (right-continuous)."""
    counts = np.searchsorted(e.sorted_samples, x, side="right")
    out = counts / e.n
    return out if np.ndim(out) else float(out)


def ks_statistic(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov-Smirnov distance between samples and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 1:
        raise ConfigError("KS statistic needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_threshold(n: int, critical: float = KS_CRITICAL_1PCT, margin: float = 1.0) -> float:
    return margin * critical / math.sqrt(n)


def histogram_density(samples, bins: int) -> HistogramDensity:
    """Equal-width histogram over [min, max] normalized to unit area."""
    x = np.asarray(samples, dtype=float).ravel()
    if bins < 1 or x.size < bins:
        raise ConfigError(f"need at least {bins} samples for {bins} bins, got {x.size}")
    lo, hi = float(x.min()), float(x.max())
    if (hi - lo) / bins <= 4.0 * np.spacing(max(abs(lo), abs(hi))):
        # range too narrow to split: one unit-width bin centred on the data
        mid = 0.5 * (lo + hi)
        return HistogramDensity(bin_edges=np.array([mid - 0.5, mid + 0.5]), densities=np.array([1.0]))
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    widths = np.diff(edges)
    return HistogramDensity(bin_edges=edges, densities=counts / (x.size * widths))


def mean_confidence_interval(samples, confidence: float = 0.95) -> MonteCarloEstimate:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ConfigError("confidence interval needs at least two samples")
    if not 0 < confidence < 1:
        raise ConfigError("confidence must lie in (0, 1)")
    if np.all(x == x[0]):
        mean, se = float(x[0]), 0.0
    else:
        mean = float(np.mean(x))
        se = float(np.std(x, ddof=1)) / math.sqrt(x.size)
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    return MonteCarloEstimate(mean=mean, std_err=se, n=int(x.size), ci_low=mean - z * se, ci_high=mean + z * se)
