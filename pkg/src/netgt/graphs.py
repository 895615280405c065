"""Community partitions and stochastic-block-model graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

from .stats import DomainError, RandomSource, as_generator

log = logging.getLogger(__name__)


class CommunityPartition:
    """Split of vertices ``0..n-1`` into ``m = n / k`` communities of size ``k``.

    By default community ``i`` owns ``[i*k, (i+1)*k)``. Any other balanced
    assignment may be passed explicitly.
    """

    def __init__(self, n: int, k: int, assignment=None):
        if n <= 0 or k <= 0:
            raise DomainError("n and k must be positive")
        if n % k:
            raise DomainError(f"community size k={k} does not divide n={n}")
        self.n = int(n)
        self.k = int(k)
        self.m = self.n // self.k
        if assignment is None:
            assignment = np.repeat(np.arange(self.m), self.k)
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.shape != (self.n,):
            raise DomainError("assignment must have one entry per vertex")
        if assignment.min() < 0 or assignment.max() >= self.m:
            raise DomainError("community ids must lie in [0, m)")
        if np.any(np.bincount(assignment, minlength=self.m) != self.k):
            raise DomainError("every community must have exactly k members")
        self.assignment = assignment
        self.assignment.flags.writeable = False
        order = np.argsort(assignment, kind="stable")
        self._members = [order[i * self.k:(i + 1) * self.k] for i in range(self.m)]

    def members(self, i: int) -> np.ndarray:
        """Vertex ids of community ``i`` in ascending order."""
        return self._members[i]

    def community_of(self, v: int) -> int:
        return int(self.assignment[v])

    @property
    def is_canonical(self) -> bool:
        return bool(np.all(self.assignment == np.repeat(np.arange(self.m), self.k)))

    def __eq__(self, other):
        return (isinstance(other, CommunityPartition) and self.n == other.n
                and self.k == other.k and np.array_equal(self.assignment, other.assignment))

    def __repr__(self):
        return f"CommunityPartition(n={self.n}, k={self.k}, m={self.m})"


@dataclass(frozen=True)
class SbmGraphParams:
    partition: CommunityPartition
    p1: float
    p2: float

    def __post_init__(self):
        if not (0.0 <= self.p2 <= self.p1 <= 1.0):
            raise DomainError(f"need 0 <= p2 <= p1 <= 1, got p1={self.p1}, p2={self.p2}")
        if self.p1 == self.p2:
            log.warning("p1 == p2 = %g: the graph has no community structure", self.p1)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as sorted neighbour arrays."""

    n: int
    neighbors: Tuple[np.ndarray, ...] = field(repr=False)
    partition: CommunityPartition
    edge_count: int

    @classmethod
    def from_edges(cls, partition: CommunityPartition, edges) -> "Graph":
        n = partition.n
        adj: List[List[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        nbrs = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
        return cls(n, nbrs, partition, len(seen))

    def degree(self, v: int) -> int:
        return degree(self, v)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Each edge once as ``(u, v)`` with ``u < v``, in ascending order."""
        for u in range(self.n):
            for v in self.neighbors[u]:
                if v > u:
                    yield u, int(v)

    def edge_set(self) -> set:
        return set(self.edges())


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.n:
        raise DomainError(f"vertex {v} out of range [0, {g.n})")
    return int(g.neighbors[v].size)


def _from_pairs(partition: CommunityPartition, us: np.ndarray, vs: np.ndarray) -> Graph:
    n = partition.n
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=n)
    nbrs = tuple(np.split(dst[order].astype(np.int64), np.cumsum(counts)[:-1]))
    return Graph(n, nbrs, partition, int(us.size))


def generate_sbm(params: SbmGraphParams, rng: RandomSource) -> Graph:
    """Two-parameter SBM: within-community pairs with ``p1``, others with ``p2``."""
    part = params.partition
    gen = as_generator(rng)
    n = part.n
    comm = part.assignment

    us, vs = np.triu_indices(n, 1)
    prob = np.where(comm[us] == comm[vs], params.p1, params.p2)
    hit = gen.random(us.size) < prob
    return _from_pairs(part, us[hit], vs[hit])


def generate_disjoint_cliques(partition: CommunityPartition) -> Graph:
    """Every within-community pair joined, nothing across communities."""
    n = partition.n
    nbrs = []
    count = 0
    for v in range(n):
        same = partition.members(partition.community_of(v))
        nbrs.append(same[same != v].astype(np.int64))
        count += same.size - 1
    return Graph(n, tuple(nbrs), partition, count // 2)


def write_edgelist(g: Graph, path) -> None:
    """Write ``n k m`` then one ``u v`` line per edge (u < v, ascending).

    The header only records sizes, so non-canonical partitions are not preserved.
    """
    part = g.partition
    lines = [f"{g.n} {part.k} {part.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_edgelist(path) -> Graph:
    text = Path(path).read_text().split("\n")
    header = text[0].split()
    if len(header) != 3:
        raise DomainError("edge-list header must be 'n k m'")
    n, k, m = map(int, header)
    part = CommunityPartition(n, k)
    if part.m != m:
        raise DomainError(f"header m={m} inconsistent with n/k={part.m}")
    edges = [tuple(map(int, line.split())) for line in text[1:] if line.strip()]
    return Graph.from_edges(part, edges)

