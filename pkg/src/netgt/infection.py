"""Two-stage infection sampling (seeds, then one round of transmission) and its marginals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import CommunityPartition, Graph
from .stats import DomainError, RandomSource, as_generator, one_minus_pow


@dataclass(frozen=True)
class SbimParams:
    """Stochastic block infection model SBIM(n, k, p, q1, q2)."""

    n: int
    k: int
    p: float
    q1: float
    q2: float

    def __post_init__(self):
        if self.n <= 0 or self.k <= 0 or self.n % self.k:
            raise DomainError(f"k={self.k} must be a positive divisor of n={self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p={self.p} outside [0, 1]")
        if not 0.0 <= self.q2 <= self.q1 <= 1.0:
            raise DomainError(f"need 0 <= q2 <= q1 <= 1, got q1={self.q1}, q2={self.q2}")

    @property
    def m(self) -> int:
        return self.n // self.k

    def partition(self) -> CommunityPartition:
        return CommunityPartition(self.n, self.k)


@dataclass(frozen=True, eq=False)
class InfectionState:
    seeds: np.ndarray
    statuses: np.ndarray

    def __post_init__(self):
        seeds = np.asarray(self.seeds, dtype=bool)
        statuses = np.asarray(self.statuses, dtype=bool)
        if seeds.shape != statuses.shape or seeds.ndim != 1:
            raise DomainError("seeds and statuses must be equal-length bit vectors")
        if np.any(seeds & ~statuses):
            raise DomainError("every seed must be infected")
        seeds.flags.writeable = False
        statuses.flags.writeable = False
        object.__setattr__(self, "seeds", seeds)
        object.__setattr__(self, "statuses", statuses)

    @property
    def n(self) -> int:
        return self.statuses.size

    @property
    def infected_count(self) -> int:
        return int(self.statuses.sum())

    def __eq__(self, other):
        return (isinstance(other, InfectionState)
                and np.array_equal(self.seeds, other.seeds)
                and np.array_equal(self.statuses, other.statuses))

    def to_lines(self) -> str:
        """Seeds bit-string, newline, statuses bit-string, newline."""
        return _bits(self.seeds) + "\n" + _bits(self.statuses) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "InfectionState":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        if len(lines) != 2:
            raise DomainError("expected exactly two bit-string lines")
        return cls(_unbits(lines[0]), _unbits(lines[1]))


def _bits(v: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in v)


def _unbits(s: str) -> np.ndarray:
    if set(s) - {"0", "1"}:
        raise DomainError(f"not a bit string: {s!r}")
    return np.frombuffer(s.encode(), dtype=np.uint8) == ord("1")


def _check_unit(**probs):
    for name, x in probs.items():
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"{name}={x} outside [0, 1]")


def spread_on_graph(g: Graph, p: float, q: float, rng: RandomSource) -> InfectionState:
    """Seed each vertex with probability p, then let each seed infect each neighbour with probability q."""
    _check_unit(p=p, q=q)
    gen = as_generator(rng)
    seeds = gen.random(g.n) < p
    statuses = seeds.copy()
    seed_ids = np.flatnonzero(seeds)
    if seed_ids.size:
        targets = np.concatenate([g.neighbors[s] for s in seed_ids])
        hit = gen.random(targets.size) < q
        statuses[targets[hit]] = True
    return InfectionState(seeds, statuses)


def sample_sbim(params: SbimParams, partition: CommunityPartition, rng: RandomSource) -> InfectionState:
    """Sample SBIM directly, without drawing a contact graph.

    Given the seeds, vertex v escapes every transmission coin with probability
    (1-q1)^(own-community seeds) * (1-q2)^(other seeds), independently of the
    other vertices, so the union of per-pair coins is drawn as one Bernoulli
    per vertex. Seeds are infected regardless of what happens to them.
    """
    seeds, statuses = sample_sbim_batch(params, partition, rng, 1)
    return InfectionState(seeds[0], statuses[0])


def sample_sbim_batch(params: SbimParams, partition: CommunityPartition, rng: RandomSource,
                      size: int):
    """``size`` independent SBIM draws as two (size, n) boolean arrays: seeds, statuses."""
    if partition.n != params.n or partition.k != params.k:
        raise DomainError("partition does not match params (n, k)")
    gen = as_generator(rng)
    seeds = gen.random((size, params.n)) < params.p
    return seeds, transmit_sbim(params, partition, seeds, gen)


def transmit_sbim(params: SbimParams, partition: CommunityPartition, seeds, rng: RandomSource):
    """Run only the transmission stage for given seed indicators (shape (n,) or (size, n))."""
    seeds = np.asarray(seeds, dtype=bool)
    if seeds.shape[-1] != partition.n:
        raise DomainError("seed vector length does not match the partition")
    gen = as_generator(rng)
    onehot = np.zeros((partition.n, partition.m))
    onehot[np.arange(partition.n), partition.assignment] = 1.0
    per_comm = (seeds @ onehot)[..., partition.assignment]
    own = per_comm - seeds
    other = seeds.sum(axis=-1, keepdims=True) - per_comm
    escape = one_minus_pow(params.q1, own) * one_minus_pow(params.q2, other)
    return seeds | (gen.random(seeds.shape) >= escape)


def marginal_general(p: float, q: float, d: int) -> float:
    """P(X_v = 1) = 1 - (1-p)(1-pq)^d for a vertex of degree d."""
    _check_unit(p=p, q=q)
    if d < 0:
        raise DomainError("degree must be non-negative")
    return 1.0 - one_minus_pow(p, 1) * one_minus_pow(p * q, d)


def marginal_sbim(params: SbimParams) -> float:
    n, k, p = params.n, params.k, params.p
    return 1.0 - (one_minus_pow(p, 1) * one_minus_pow(p * params.q1, k - 1)
                  * one_minus_pow(p * params.q2, n - k))


def community_marginal(params: SbimParams) -> float:
    """Probability that a given community holds at least one infected member."""
    n, k, p = params.n, params.k, params.p
    reach = 1.0 - one_minus_pow(params.q2, k)
    return 1.0 - one_minus_pow(p, k) * one_minus_pow(p * reach, n - k)


def community_status(state: InfectionState, partition: CommunityPartition) -> np.ndarray:
    """Per-community OR of the infection statuses."""
    if state.n != partition.n:
        raise DomainError(f"state has {state.n} vertices, partition has {partition.n}")
    counts = np.bincount(partition.assignment, weights=state.statuses, minlength=partition.m)
    return counts > 0
