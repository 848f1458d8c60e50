"""Counter-based random streams for reproducible, partition-free Monte Carlo.

Every draw is a pure function of ``(seed, label, tag, trial index)``. A
Philox key is derived from ``(seed, label, tag)`` by BLAKE2b and trial ``t``
owns a fixed, aligned slice of the Philox counter space. Any split of the
trial range into batches or workers therefore reproduces the same numbers.

Complex Gaussians come from the Box-Muller transform in polar form:
``z = sqrt(-v ln(1 - u1)) * exp(2j pi u2)`` gives ``|z|^2 ~ Exp(mean v)``
and a uniform phase, so ``z ~ CN(0, v)`` with real and imaginary parts of
variance ``v / 2`` each.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_WORDS_PER_BLOCK = 4


def _philox_key(seed: int, label: str, tag: str) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}|{label}|{tag}".encode(), digest_size=16).digest()
    return np.frombuffer(digest, dtype="<u8").astype(np.uint64)


def _uniform_block(seed: int, label: str, tag: str, start: int, stop: int, words: int) -> np.ndarray:
    stride = -(-words // _WORDS_PER_BLOCK)
    counter = np.array([start * stride, 0, 0, 0], dtype=np.uint64)
    bitgen = np.random.Philox(key=_philox_key(seed, label, tag), counter=counter)
    flat = np.random.Generator(bitgen).random((stop - start) * stride * _WORDS_PER_BLOCK)
    return flat.reshape(stop - start, stride * _WORDS_PER_BLOCK)[:, :words]


@dataclass(frozen=True)
class TrialStream:
    """Random-stream handle covering trials ``[start, stop)``.

    ``label`` identifies the experiment point; ``tag`` arguments identify
    the random segment (one independent stream per tag).
    """

    seed: int
    label: str = ""
    start: int = 0
    stop: int = 1

    def __post_init__(self):
        if not 0 <= self.start <= self.stop:
            raise ValueError(f"invalid trial range [{self.start}, {self.stop})")

    @property
    def n_trials(self) -> int:
        return self.stop - self.start

    def span(self, start: int, stop: int) -> "TrialStream":
        return TrialStream(self.seed, self.label, start, stop)

    def child(self, suffix: str) -> "TrialStream":
        return TrialStream(self.seed, f"{self.label}/{suffix}", self.start, self.stop)

    def uniform(self, tag: str, count: int) -> np.ndarray:
        """Uniform [0, 1) draws of shape ``(n_trials, count)``."""
        if self.n_trials == 0 or count == 0:
            return np.zeros((self.n_trials, count))
        return _uniform_block(self.seed, self.label, tag, self.start, self.stop, count)

    def complex_normal(self, tag: str, shape: tuple[int, ...], variance: float = 1.0) -> np.ndarray:
        """CN(0, variance) entries, shape ``(n_trials, *shape)``."""
        count = int(np.prod(shape, dtype=np.int64))
        u = self.uniform(tag, 2 * count)
        radius = np.log1p(-u[:, :count])
        radius *= -variance
        np.sqrt(radius, out=radius)
        phase = u[:, count:] * (2.0 * np.pi)
        z = np.empty(radius.shape, dtype=complex)
        np.multiply(radius, np.cos(phase), out=z.real)
        np.multiply(radius, np.sin(phase), out=z.imag)
        return z.reshape((self.n_trials, *shape))
