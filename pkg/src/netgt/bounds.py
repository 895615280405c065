"""Expected-test upper bounds, Monte-Carlo entropy lower bounds and regime checks.

Closed-form upper bounds use log2 exactly. Order expressions (``table1_orders``)
and the regime classifier use natural logs since they carry no constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .infection import SbimParams, community_marginal, marginal_sbim
from .stats import (DomainError, RandomSource, as_generator, binary_entropy,
                    binom_samples, one_minus_pow)

Z_95 = 1.96


def _check_clique_args(n: int, k: int, p: float, q: float) -> int:
    if n <= 0 or k <= 0 or n % k:
        raise DomainError(f"k={k} must be a positive divisor of n={n}")
    for name, x in (("p", p), ("q", q)):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"{name}={x} outside [0, 1]")
    return n // k


def _clique_marginal(p: float, q: float, k: int) -> float:
    return 1.0 - one_minus_pow(p, 1) * one_minus_pow(p * q, k - 1)


def ub_binary_cliques(n: int, k: int, p: float, q: float) -> float:
    """Binary splitting on disjoint k-cliques: m k (log2 m + log2 k + 1) P(X_v = 1)."""
    m = _check_clique_args(n, k, p, q)
    return m * k * (math.log2(m) + math.log2(k) + 1) * _clique_marginal(p, q, k)


def ub_graphaware_cliques(n: int, k: int, p: float, q: float) -> float:
    m = _check_clique_args(n, k, p, q)
    community = 1.0 - one_minus_pow(p, k)
    return (m * (math.log2(m) + 1) * community
            + n * (math.log2(k) + 1) * _clique_marginal(p, q, k))


def ub_binary_sbim(params: SbimParams) -> float:
    n = params.n
    return n * (math.log2(n) + 1) * marginal_sbim(params)


def ub_graphaware_sbim(params: SbimParams) -> float:
    n, k, m = params.n, params.k, params.m
    return (m * (math.log2(m) + 1) * community_marginal(params)
            + n * (math.log2(k) + 1) * marginal_sbim(params))


@dataclass(frozen=True)
class LowerBoundEstimate:
    """Floored lower-bound estimate plus the raw Monte-Carlo term it came from."""

    estimate: float
    halfwidth: float
    mc_term: float
    samples: int

    def __iter__(self):
        # unpacks as (estimate, halfwidth)
        return iter((self.estimate, self.halfwidth))


def _mc(values: np.ndarray, scale: float) -> Tuple[float, float]:
    vals = values * scale
    mean = float(vals.mean())
    if vals.size < 2:
        return mean, 0.0
    return mean, Z_95 * float(vals.std(ddof=1)) / math.sqrt(vals.size)


def lb_cliques_mc(n: int, k: int, p: float, q: float, samples: int,
                  rng: RandomSource) -> LowerBoundEstimate:
    """Entropy lower bound for disjoint k-cliques.

    Estimates m * E[(k - Z) h(1 - (1-q)^Z)] with Z ~ Binom(k, p), then takes the
    max with the community-entropy bound m h(1 - (1-p)^k) and with 1. The
    halfwidth is a 95% interval on the Monte-Carlo term alone.
    """
    m = _check_clique_args(n, k, p, q)
    if samples < 1:
        raise DomainError("samples must be >= 1")
    gen = as_generator(rng)
    z = binom_samples(k, p, gen, size=samples)
    terms = (k - z) * binary_entropy(1.0 - one_minus_pow(q, z))
    mc, hw = _mc(terms, m)
    community = m * binary_entropy(1.0 - one_minus_pow(p, k))
    return LowerBoundEstimate(max(mc, community, 1.0), hw, mc, samples)


def lb_sbim_mc(params: SbimParams, samples: int, rng: RandomSource) -> LowerBoundEstimate:
    """m * E[(k - Z) h(1 - (1-q1)^Z (1-q2)^Z')], Z ~ Binom(k,p), Z' ~ Binom(n-k,p), floored at 1."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    n, k, p = params.n, params.k, params.p
    gen = as_generator(rng)
    z = binom_samples(k, p, gen, size=samples)
    z_out = binom_samples(n - k, p, gen, size=samples)
    escape = one_minus_pow(params.q1, z) * one_minus_pow(params.q2, z_out)
    terms = (k - z) * binary_entropy(1.0 - escape)
    mc, hw = _mc(terms, params.m)
    return LowerBoundEstimate(max(mc, 1.0), hw, mc, samples)


@dataclass(frozen=True)
class BoundReport:
    params: SbimParams
    ub_binary: float
    ub_graph_aware: float
    lb_monte_carlo: float
    lb_halfwidth: float
    lb_samples: int

    CSV_HEADER = "n,k,p,q1,q2,ub_binary,ub_graph_aware,lb,lb_halfwidth,lb_samples"

    def csv_row(self) -> str:
        prm = self.params
        return (f"{prm.n},{prm.k},{prm.p:.6f},{prm.q1:.6f},{prm.q2:.6f},"
                f"{self.ub_binary:.6f},{self.ub_graph_aware:.6f},"
                f"{self.lb_monte_carlo:.6f},{self.lb_halfwidth:.6f},{self.lb_samples}")

    def text(self) -> str:
        prm = self.params
        return "\n".join([
            f"SBIM(n={prm.n}, k={prm.k}, p={prm.p:g}, q1={prm.q1:g}, q2={prm.q2:g}), m={prm.m}",
            f"  upper bound, binary splitting : {self.ub_binary:.3f} tests (log2)",
            f"  upper bound, graph-aware      : {self.ub_graph_aware:.3f} tests (log2)",
            f"  entropy lower bound (MC)      : {self.lb_monte_carlo:.3f} "
            f"+/- {self.lb_halfwidth:.3f} (95%, {self.lb_samples} samples)",
        ])


def bound_report(params: SbimParams, samples: int, rng: RandomSource) -> BoundReport:
    lb = lb_sbim_mc(params, samples, rng)
    return BoundReport(params, ub_binary_sbim(params), ub_graphaware_sbim(params),
                       lb.estimate, lb.halfwidth, samples)


@dataclass(frozen=True)
class RegimeReport:
    lower_bound_valid: bool
    tightness: bool
    improvement: bool
    improvement_factor: Optional[float]
    threshold_constant: float
    alpha: float
    subregime: Optional[str] = None
    diagnostics: List[str] = field(default_factory=list)

    def text(self) -> str:
        lines = [f"threshold constant c={self.threshold_constant:g}, alpha={self.alpha:g}",
                 f"  lower bound valid : {self.lower_bound_valid}",
                 f"  lower bound tight : {self.tightness}",
                 f"  improvement       : {self.improvement}"]
        if self.improvement:
            lines.append(f"  improvement factor: {self.improvement_factor:.4g}"
                         + (f" (condition 3{self.subregime})" if self.subregime else ""))
        lines.extend(f"  note: {d}" for d in self.diagnostics)
        return "\n".join(lines)


def regime_classify(params: SbimParams, c: float = 1.0, alpha: float = 0.5) -> RegimeReport:
    """Evaluate the asymptotic regime conditions as concrete inequalities.

    ``a <~ b`` is read as ``a <= c*b`` and ``a >> b`` as ``a > c*b``; the
    reversed relations swap operands. Natural logs throughout.
    """
    if c <= 0:
        raise DomainError("threshold constant c must be positive")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")

    def le(a, b):
        return a <= c * b

    def gt(a, b):
        return a > c * b

    k, m, p, q1, q2 = params.k, params.m, params.p, params.q1, params.q2
    kp, kq1, mkq2 = k * p, k * q1, m * k * q2
    notes: List[str] = []

    if kp >= 1.0:
        notes.append(f"k*p = {kp:g} >= 1: log(1/(k p)) undefined, "
                     "lower-bound and tightness conditions reported false")
        lb_valid = tight = False
    else:
        log_inv = math.inf if kp == 0 else math.log(1.0 / kp)
        lb_valid = le(kp, 1.0) and le(q1, 1.0 / math.sqrt(k * log_inv))
        tight = (le(kp, m ** (-alpha)) and le(1.0, kq1)
                 and le(kq1, math.sqrt(k / log_inv)))

    log_ratio = math.log(m) / math.log(k) if k > 1 else math.inf
    base = gt(math.log(m), math.log(k)) and gt(kq1, 1.0)
    sub = None
    factor = None
    if base:
        if le(mkq2, 1.0):
            sub = "(i)"
            factor = min(kq1, log_ratio)
        elif p > 0 and le(1.0, mkq2) and gt(kq1, mkq2) and le(kq1, 1.0 / p ** 2):
            sub = "(ii)"
            factor = min(q1 / (m * q2), log_ratio)
    improvement = sub is not None
    if q2 == 0:
        sub = None  # disjoint cliques: no SBIM sub-regime to report
    return RegimeReport(lb_valid, tight, improvement, factor if improvement else None,
                        c, alpha, sub, notes)


def table1_orders(n: int, k: int, p: float, q: float) -> Tuple[float, float, float]:
    """Order-of-growth expressions for disjoint k-cliques (natural log, no constants).

    Returns (binary splitting, graph-aware, lower bound). Only ratios between
    these values are meaningful.
    """
    m = _check_clique_args(n, k, p, q)
    kp = k * p
    if kp >= 1.0:
        raise DomainError(f"k*p = {kp:g} must be < 1 for the logarithmic terms")
    lm, lk = math.log(m), math.log(k)
    spread = m * k * k * p * (1.0 / k + q)
    binary = spread * lm + spread * lk
    graph = m * kp * lm + spread * lk
    if p == 0:
        return binary, graph, 1.0
    log_inv = math.log(1.0 / kp)
    lower = m * kp * log_inv + m * k * k * p * q * (lk + math.log(log_inv)) + 1.0
    return binary, graph, lower
