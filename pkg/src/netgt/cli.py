"""Command-line entry point: ``netgt {simulate,experiment,bounds,regimes}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .algorithms import ALGORITHMS, format_transcript, run_on_state
from .bounds import bound_report, regime_classify
from .harness import (CSV_HEADER, CSV_SCHEMA_VERSION, ConfigError, ExperimentConfig,
                      apply_settings, csv_lines, emit_csv, load_config, run_sweep)
from .infection import SbimParams, sample_sbim
from .stats import DomainError, RngStream

log = logging.getLogger("netgt")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG = 0, 1, 2


def _model_args(p: argparse.ArgumentParser, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--n", type=int, default=d(1000), help="population size")
    p.add_argument("--k", type=int, default=d(20), help="community size (divides n)")
    p.add_argument("--q1", type=float, default=d(0.01), help="within-community transmission")
    p.add_argument("--q2", type=float, default=d(0.001), help="cross-community transmission")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netgt", description="Adaptive group testing over community-structured networks.")
    parser.add_argument("--version", action="version",
                        version=f"netgt {__version__} (csv schema {CSV_SCHEMA_VERSION})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trial and summarise the tests used")
    _model_args(sim)
    sim.add_argument("--p", type=float, default=0.05, help="seed probability")
    sim.add_argument("--alg", choices=ALGORITHMS + ("both",), default="both")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--transcript", metavar="PATH", help="write the test transcript here")

    exp = sub.add_parser("experiment", help="sweep p and write per-point summaries as CSV")
    exp.add_argument("--config", metavar="FILE", help="key = value configuration file")
    _model_args(exp, defaults=False)
    exp.add_argument("--p-grid", help="comma list or start:stop:step")
    exp.add_argument("--seed", type=int)
    exp.add_argument("--trials", type=int, help="trials per grid point")
    exp.add_argument("--mc-samples", type=int, help="Monte-Carlo samples for the lower bound")
    exp.add_argument("--algorithms", help="comma list of algorithms")
    exp.add_argument("--workers", type=int, help="worker threads")
    exp.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    exp.add_argument("--no-plot", action="store_true",
                     help="skip the PNG figure written next to --out")

    bnd = sub.add_parser("bounds", help="print upper bounds and the Monte-Carlo lower bound")
    _model_args(bnd)
    bnd.add_argument("--p", type=float, required=True)
    bnd.add_argument("--samples", type=int, default=100000)
    bnd.add_argument("--seed", type=int, default=0)
    bnd.add_argument("--header", action="store_true", help="print the CSV header first")

    reg = sub.add_parser("regimes", help="classify parameters against the asymptotic regimes")
    _model_args(reg)
    reg.add_argument("--p", type=float, required=True)
    reg.add_argument("--c", type=float, default=1.0, help="threshold constant")
    reg.add_argument("--alpha", type=float, default=0.5)
    return parser


def _cmd_simulate(args) -> int:
    params = SbimParams(args.n, args.k, args.p, args.q1, args.q2)
    partition = params.partition()
    state = sample_sbim(params, partition, RngStream(args.seed))
    algs = ALGORITHMS if args.alg == "both" else (args.alg,)
    print(f"SBIM(n={params.n}, k={params.k}, p={params.p:g}, q1={params.q1:g}, "
          f"q2={params.q2:g}) seed={args.seed}")
    print(f"seeds={int(state.seeds.sum())} infected={state.infected_count}")
    transcripts = []
    for alg in algs:
        rec, result = run_on_state(state, partition, alg, record=True)
        extra = ""
        if result.community_tests is not None:
            extra = f" (community stage {result.community_tests}, member stage {result.member_tests})"
        print(f"{alg}: {rec.tests_used} tests{extra}, exact recovery: {rec.exact}")
        transcripts.append(f"# {alg}\n" + format_transcript(result.transcript))
    if args.transcript:
        Path(args.transcript).write_text("".join(transcripts), newline="\n")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    overrides = {key: getattr(args, key) for key in
                 ("n", "k", "q1", "q2", "p_grid", "seed", "trials", "mc_samples",
                  "algorithms", "workers", "out")
                 if getattr(args, key) is not None}
    if args.config:
        config = load_config(args.config, overrides)
    else:
        config = apply_settings(ExperimentConfig(), overrides).validate()
    rows = run_sweep(config)
    if config.out:
        path = emit_csv(rows, config.out)
        log.info("wrote %s", path)
        if not args.no_plot:
            from .plotting import plot_sweep
            fig = plot_sweep(rows, path.with_suffix(".png"),
                             title=f"n={config.n}, k={config.k}, q1={config.q1:g}, q2={config.q2:g}")
            log.info("wrote %s", fig)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(csv_lines(rows))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    params = SbimParams(args.n, args.k, args.p, args.q1, args.q2)
    report = bound_report(params, args.samples, RngStream(args.seed))
    if args.header:
        print(report.CSV_HEADER)
    print(report.csv_row())
    print(report.text(), file=sys.stderr)
    return EXIT_OK


def _cmd_regimes(args) -> int:
    params = SbimParams(args.n, args.k, args.p, args.q1, args.q2)
    print(regime_classify(params, args.c, args.alpha).text())
    return EXIT_OK


COMMANDS = {"simulate": _cmd_simulate, "experiment": _cmd_experiment,
            "bounds": _cmd_bounds, "regimes": _cmd_regimes}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"netgt: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"netgt: I/O error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # surfaced loudly, e.g. a recovery failure
        log.exception("internal error")
        print(f"netgt: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
