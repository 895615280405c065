"""Seeded random streams, binary entropy, binomial draws and summary statistics."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

_U64 = (1 << 64) - 1

# Above this many trials a binomial draw is delegated to numpy's sampler
# (inversion for small means, BTPE rejection otherwise).
BERNOULLI_SUM_LIMIT = 64


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


@dataclass(frozen=True)
class RngStream:
    """An immutable (seed, stream-id) pair naming one independent random stream.

    Calling :meth:`generator` always builds a fresh generator positioned at the
    start of the stream, so the same pair reproduces the same draws.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _U64 and 0 <= self.stream_id <= _U64):
            raise DomainError("seed and stream_id must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def derive(self, *labels) -> "RngStream":
        """Child stream of the same seed, keyed by this stream-id plus ``labels``."""
        return RngStream(self.seed, stream_id_for(self.stream_id, *labels))


def stream_id_for(*labels) -> int:
    """Hash a tuple of ints/strings to a 64-bit stream id."""
    h = hashlib.blake2b(repr(tuple(labels)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


RandomSource = Union[RngStream, np.random.Generator]


def as_generator(rng: RandomSource) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _check_prob(x, name="p"):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return arr


def binary_entropy(x):
    """Binary entropy in bits, with h(0) = h(1) = 0.

    Accepts a scalar or an array; returns the same shape.
    """
    arr = _check_prob(x, "x")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(arr * np.log2(arr)) - (1.0 - arr) * np.log2(1.0 - arr)
    h = np.where((arr == 0.0) | (arr == 1.0), 0.0, h)
    if h.ndim == 0:
        return float(h)
    return h


def one_minus_pow(x, r):
    """``(1 - x) ** r`` through log1p, exact at the corners x = 1 or r = 0."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(r * np.log1p(-x))
    out = np.where(r == 0, 1.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def binom_sample(trials: int, p: float, rng: RandomSource) -> int:
    """One draw from Binomial(trials, p)."""
    return int(binom_samples(trials, p, rng, size=None))


def binom_samples(trials: int, p: float, rng: RandomSource, size=None):
    """Draws from Binomial(trials, p).

    Small trial counts sum explicit Bernoulli coins; larger ones use numpy's
    binomial sampler. ``size=None`` returns a scalar.
    """
    if trials < 0:
        raise DomainError("trials must be non-negative")
    _check_prob(p)
    gen = as_generator(rng)
    if p == 0.0 or trials == 0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    if p == 1.0:
        return trials if size is None else np.full(size, trials, dtype=np.int64)
    if trials <= BERNOULLI_SUM_LIMIT:
        shape = (trials,) if size is None else (*np.atleast_1d(size), trials)
        draws = (gen.random(shape) < p).sum(axis=-1)
        return int(draws) if size is None else draws.astype(np.int64)
    draws = gen.binomial(trials, p, size=size)
    return int(draws) if size is None else draws.astype(np.int64)


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    std_dev: float
    std_error: float


def summarize(values: Sequence[float]) -> SummaryStats:
    """Count, mean, sample standard deviation (n - 1 divisor) and standard error."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError("cannot summarize an empty sequence")
    count = int(arr.size)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if count >= 2 else 0.0
    return SummaryStats(count, mean, std, std / math.sqrt(count))
