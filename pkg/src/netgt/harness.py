"""Parameter sweeps over the seed probability, with bound overlays and CSV output."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .algorithms import ALGORITHMS, BINARY_SPLITTING, GRAPH_AWARE, run_on_state
from .bounds import lb_sbim_mc, ub_binary_sbim, ub_graphaware_sbim
from .infection import SbimParams, sample_sbim
from .stats import DomainError, RngStream, SummaryStats, summarize

CSV_SCHEMA_VERSION = 1
CSV_HEADER = ["p", "alg", "mean_tests", "std_tests", "stderr_tests",
              "mean_alpha", "ub", "lb", "lb_halfwidth"]

# stream labels separating the purposes that draw from one seed
_TRIAL = "trial"
_LOWER_BOUND = "lower-bound"


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass
class ExperimentConfig:
    n: int = 1000
    k: int = 20
    p_grid: List[float] = field(default_factory=lambda: [round(0.005 * i, 3) for i in range(21)])
    q1: float = 0.01
    q2: float = 0.001
    trials: int = 20
    mc_samples: int = 20000
    seed: int = 0
    algorithms: List[str] = field(default_factory=lambda: list(ALGORITHMS))
    out: Optional[str] = None
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.n <= 0:
            raise ConfigError("n: must be a positive integer")
        if self.k <= 0 or self.n % self.k:
            raise ConfigError(f"k: must be a positive divisor of n={self.n}")
        if not self.p_grid:
            raise ConfigError("p_grid: must contain at least one value")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigError("p_grid: values must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ConfigError("p_grid: values must be strictly increasing")
        if not 0.0 <= self.q2 <= self.q1 <= 1.0:
            raise ConfigError("q1/q2: need 0 <= q2 <= q1 <= 1")
        if self.trials < 1:
            raise ConfigError("trials: must be positive")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples: must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if not self.algorithms or set(self.algorithms) - set(ALGORITHMS):
            raise ConfigError(f"algorithms: choose from {', '.join(ALGORITHMS)}")
        if self.workers < 1:
            raise ConfigError("workers: must be positive")
        return self


def parse_p_grid(text: str) -> List[float]:
    """Comma list (``0,0.01,0.02``) or inclusive range ``start:stop:step``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ConfigError("p_grid: range step must be positive")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"p_grid: cannot parse {text!r}") from None


_CONVERTERS = {
    "n": int, "k": int, "q1": float, "q2": float, "trials": int,
    "mc_samples": int, "seed": int, "workers": int, "out": str,
    "p_grid": parse_p_grid,
    "algorithms": lambda s: [a.strip() for a in s.split(",") if a.strip()],
}


def apply_settings(config: ExperimentConfig, settings: Dict[str, str]) -> ExperimentConfig:
    values = {}
    for key, raw in settings.items():
        name = key.strip().replace("-", "_")
        if name not in _CONVERTERS:
            raise ConfigError(f"{key}: unknown configuration key")
        try:
            values[name] = _CONVERTERS[name](raw) if isinstance(raw, str) else raw
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return replace(config, **values)


def read_config_file(path) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    settings = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        settings[key.strip()] = value.strip()
    return settings


def load_config(path, overrides: Optional[Dict[str, str]] = None) -> ExperimentConfig:
    config = apply_settings(ExperimentConfig(), read_config_file(path))
    if overrides:
        config = apply_settings(config, overrides)
    return config.validate()


@dataclass
class SweepRow:
    p: float
    tests: Dict[str, SummaryStats]
    alpha: SummaryStats
    ub_binary: float
    ub_graph_aware: float
    lb_estimate: float
    lb_halfwidth: float
    all_exact: bool = True

    def upper_bound(self, algorithm: str) -> float:
        return self.ub_binary if algorithm == BINARY_SPLITTING else self.ub_graph_aware


def _trial(args) -> Tuple[int, Dict[str, int]]:
    params, partition, algorithms, stream = args
    state = sample_sbim(params, partition, stream)
    counts = {alg: run_on_state(state, partition, alg)[0].tests_used for alg in algorithms}
    return state.infected_count, counts


def run_sweep(config: ExperimentConfig) -> List[SweepRow]:
    """Run ``config.trials`` trials per grid point and attach the bounds.

    Each trial samples one instance and runs every selected algorithm on it.
    Trial (i, j) draws from its own stream keyed by (p-index, trial-index), so
    the output does not depend on ``config.workers``.
    """
    config.validate()
    root = RngStream(config.seed)
    rows = []
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        for i, p in enumerate(config.p_grid):
            params = SbimParams(config.n, config.k, p, config.q1, config.q2)
            partition = params.partition()
            jobs = [(params, partition, config.algorithms, root.derive(_TRIAL, i, j))
                    for j in range(config.trials)]
            results = list(pool.map(_trial, jobs)) if config.workers > 1 else list(map(_trial, jobs))
            alphas = [a for a, _ in results]
            tests = {alg: summarize([c[alg] for _, c in results]) for alg in config.algorithms}
            lb = lb_sbim_mc(params, config.mc_samples, root.derive(_LOWER_BOUND, i))
            rows.append(SweepRow(p, tests, summarize(alphas), ub_binary_sbim(params),
                                 ub_graphaware_sbim(params), lb.estimate, lb.halfwidth))
    return rows


def csv_lines(rows: Sequence[SweepRow]) -> List[List[str]]:
    out = []
    for row in rows:
        for alg, st in row.tests.items():
            out.append([f"{row.p:.6f}", alg, f"{st.mean:.6f}", f"{st.std_dev:.6f}",
                        f"{st.std_error:.6f}", f"{row.alpha.mean:.6f}",
                        f"{row.upper_bound(alg):.6f}", f"{row.lb_estimate:.6f}",
                        f"{row.lb_halfwidth:.6f}"])
    return out


def emit_csv(rows: Sequence[SweepRow], path) -> Path:
    if not rows:
        raise DomainError("no sweep rows to write")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(csv_lines(rows))
    return path


def read_csv(path) -> List[Dict[str, object]]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise DomainError(f"unexpected CSV header {reader.fieldnames}")
        return [{k: (v if k == "alg" else float(v)) for k, v in rec.items()} for rec in reader]


def relative_reduction(row: SweepRow) -> float:
    """Fractional saving of graph-aware over binary splitting at one grid point."""
    bs = row.tests[BINARY_SPLITTING].mean
    ga = row.tests[GRAPH_AWARE].mean
    return 0.0 if bs == 0 else 1.0 - ga / bs
