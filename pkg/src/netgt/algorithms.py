"""Noiseless pooled-test oracle and the two adaptive identification algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .graphs import CommunityPartition
from .infection import InfectionState, SbimParams, sample_sbim
from .stats import DomainError, RandomSource, as_generator

BINARY_SPLITTING = "binary-splitting"
GRAPH_AWARE = "graph-aware"
ALGORITHMS = (BINARY_SPLITTING, GRAPH_AWARE)


class RecoveryError(RuntimeError):
    """An algorithm returned statuses that differ from the hidden truth."""


Transcript = List[Tuple[np.ndarray, bool]]


class TestOracle:
    """Hidden infection vector answering OR-queries over subsets.

    With ``record=False`` only the counter is kept; bulk simulations use this
    to avoid storing every queried subset.
    """

    __test__ = False  # not a pytest class

    def __init__(self, truth, record: bool = True):
        self._truth = np.asarray(truth, dtype=bool).copy()
        self._truth.flags.writeable = False
        self.n = self._truth.size
        self.queries_used = 0
        self.record = record
        self.transcript: Transcript = []

    def query(self, subset) -> bool:
        ids = np.asarray(subset, dtype=np.int64).ravel()
        if ids.size == 0:
            raise DomainError("cannot test an empty pool")
        if ids.min() < 0 or ids.max() >= self.n:
            raise DomainError("pool contains ids outside [0, n)")
        outcome = bool(self._truth[ids].any())
        self.queries_used += 1
        if self.record:
            self.transcript.append((ids.copy(), outcome))
        return outcome

    def matches(self, recovered) -> bool:
        return bool(np.array_equal(np.asarray(recovered, dtype=bool), self._truth))

    def replay(self, transcript: Optional[Transcript] = None) -> bool:
        """True iff every recorded outcome equals the OR of the truth over its pool."""
        entries = self.transcript if transcript is None else transcript
        return all(bool(self._truth[ids].any()) == out for ids, out in entries)


@dataclass
class AlgorithmResult:
    recovered: np.ndarray
    tests_used: int
    transcript: Transcript = field(repr=False, default_factory=list)
    # graph-aware only: tests in the community stage and the within-community stage
    community_tests: Optional[int] = None
    member_tests: Optional[int] = None

    @property
    def infected(self) -> np.ndarray:
        return np.flatnonzero(self.recovered)


def find_positives(items: np.ndarray, test: Callable[[np.ndarray], bool]) -> list:
    """Binary splitting over ``items`` with an arbitrary OR-test.

    Tests the whole unresolved set; on a positive, halves it (left half gets
    the extra element) and tests the left half, inferring the right half
    positive when the left is negative, until one item is isolated. Cleared
    halves stay cleared and the loop restarts on whatever is left unresolved.
    """
    unresolved = np.asarray(items)
    found = []
    while unresolved.size and test(unresolved):
        current = unresolved
        pending = []
        while current.size > 1:
            half = (current.size + 1) // 2
            left, right = current[:half], current[half:]
            if test(left):
                pending.append(right)
                current = left
            else:
                current = right
        found.append(current[0].item())
        # deeper right halves sit earlier in the order
        unresolved = (np.concatenate(pending[::-1]) if pending
                      else unresolved[:0])
    return found


def binary_splitting(oracle: TestOracle, items: Sequence[int]) -> AlgorithmResult:
    ids = np.asarray(items, dtype=np.int64)
    if ids.size == 0:
        raise DomainError("binary splitting needs at least one item")
    if np.unique(ids).size != ids.size:
        raise DomainError("items must be distinct")
    start = oracle.queries_used
    recovered = np.zeros(oracle.n, dtype=bool)
    recovered[find_positives(ids, oracle.query)] = True
    return AlgorithmResult(recovered, oracle.queries_used - start,
                           oracle.transcript[start:] if oracle.record else [])


def graph_aware(oracle: TestOracle, partition: CommunityPartition) -> AlgorithmResult:
    """Binary splitting over pooled communities, then inside each positive community."""
    if oracle.n != partition.n:
        raise DomainError("oracle population does not match the partition")
    start = oracle.queries_used
    # communities are equal-sized, so a pool of communities is one fancy index
    members = np.stack([partition.members(i) for i in range(partition.m)])

    def community_test(comms: np.ndarray) -> bool:
        return oracle.query(members[comms].ravel())

    positive = sorted(find_positives(np.arange(partition.m), community_test))
    community_tests = oracle.queries_used - start

    recovered = np.zeros(oracle.n, dtype=bool)
    for c in positive:
        recovered[find_positives(members[c], oracle.query)] = True
    used = oracle.queries_used - start
    return AlgorithmResult(recovered, used,
                           oracle.transcript[start:] if oracle.record else [],
                           community_tests=community_tests,
                           member_tests=used - community_tests)


def run_algorithm(name: str, oracle: TestOracle, partition: CommunityPartition) -> AlgorithmResult:
    if name == BINARY_SPLITTING:
        return binary_splitting(oracle, np.arange(oracle.n))
    if name == GRAPH_AWARE:
        return graph_aware(oracle, partition)
    raise DomainError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


@dataclass(frozen=True)
class TrialRecord:
    algorithm: str
    tests_used: int
    infected: int
    exact: bool


def run_on_state(state: InfectionState, partition: CommunityPartition, algorithm: str,
                 record: bool = False) -> Tuple[TrialRecord, AlgorithmResult]:
    oracle = TestOracle(state.statuses, record=record)
    result = run_algorithm(algorithm, oracle, partition)
    if not oracle.matches(result.recovered):
        raise RecoveryError(f"{algorithm} failed to recover the infection vector")
    return TrialRecord(algorithm, result.tests_used, state.infected_count, True), result


def run_trial(params: SbimParams, partition: CommunityPartition, algorithm: str,
              rng: RandomSource) -> TrialRecord:
    """Sample one SBIM instance and identify it with ``algorithm``."""
    state = sample_sbim(params, partition, as_generator(rng))
    record, _ = run_on_state(state, partition, algorithm)
    return record


def format_transcript(transcript: Transcript) -> str:
    """One line per test: ``t size id,id,... outcome`` with t starting at 1."""
    lines = []
    for t, (ids, outcome) in enumerate(transcript, start=1):
        lines.append(f"{t} {ids.size} {','.join(map(str, ids.tolist()))} {int(outcome)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_transcript(text: str) -> Transcript:
    entries: Transcript = []
    for line in text.splitlines():
        if not line.strip():
            continue
        t, size, ids, outcome = line.split()
        arr = np.array([int(x) for x in ids.split(",")], dtype=np.int64)
        if arr.size != int(size):
            raise DomainError(f"test {t}: declared size {size} but {arr.size} ids")
        entries.append((arr, outcome == "1"))
    return entries
