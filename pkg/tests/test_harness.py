import math

import pytest

from netgt import __version__
from netgt.algorithms import BINARY_SPLITTING, GRAPH_AWARE
from netgt.cli import main
from netgt.harness import (CSV_HEADER, ConfigError, ExperimentConfig, apply_settings,
                           emit_csv, load_config, parse_p_grid, read_csv,
                           relative_reduction, run_sweep)
from netgt.stats import DomainError


def small_config(**kw):
    base = dict(n=60, k=6, p_grid=[0.0, 0.05, 0.1], q1=0.3, q2=0.02, trials=8,
                mc_samples=500, seed=3)
    base.update(kw)
    return ExperimentConfig(**base).validate()


def test_parse_p_grid_forms():
    assert parse_p_grid("0,0.01, 0.02") == [0.0, 0.01, 0.02]
    grid = parse_p_grid("0:0.1:0.005")
    assert len(grid) == 21 and grid[0] == 0.0 and grid[-1] == pytest.approx(0.1)
    with pytest.raises(ConfigError, match="p_grid"):
        parse_p_grid("0:1:0")
    with pytest.raises(ConfigError, match="p_grid"):
        parse_p_grid("a,b")


@pytest.mark.parametrize("settings,field_name", [
    ({"k": "7"}, "k"), ({"trials": "0"}, "trials"), ({"q2": "0.5"}, "q1/q2"),
    ({"p_grid": "0.1,0.05"}, "p_grid"), ({"algorithms": "individual"}, "algorithms"),
    ({"workers": "0"}, "workers"), ({"seed": "-1"}, "seed"), ({"n": "0"}, "n"),
])
def test_config_errors_name_the_field(settings, field_name):
    with pytest.raises(ConfigError, match=field_name):
        apply_settings(ExperimentConfig(), settings).validate()


def test_config_rejects_unknown_and_unparseable():
    with pytest.raises(ConfigError, match="colour"):
        apply_settings(ExperimentConfig(), {"colour": "red"})
    with pytest.raises(ConfigError, match="trials"):
        apply_settings(ExperimentConfig(), {"trials": "many"})


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn = 100\nk = 10  # trailing\np_grid = 0,0.02\n"
                   "algorithms = graph-aware\n")
    config = load_config(cfg, {"seed": "9", "k": "5"})
    assert (config.n, config.k, config.seed) == (100, 5, 9)
    assert config.p_grid == [0.0, 0.02]
    assert config.algorithms == [GRAPH_AWARE]
    bad = tmp_path / "bad.cfg"
    bad.write_text("n 100\n")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(bad)
    with pytest.raises(ConfigError, match="config"):
        load_config(tmp_path / "missing.cfg")


def test_shipped_configs_load():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    for k in (10, 20, 50, 100):
        config = load_config(root / f"fig5_k{k}.cfg")
        assert config.k == k and config.n == 1000 and len(config.p_grid) == 21


def test_zero_probability_sweep():
    rows = run_sweep(small_config(p_grid=[0.0]))
    (row,) = rows
    for alg in (BINARY_SPLITTING, GRAPH_AWARE):
        assert row.tests[alg].mean == 1.0 and row.tests[alg].std_dev == 0.0
    assert row.alpha.mean == 0.0
    assert row.ub_binary == row.ub_graph_aware == 0.0


def test_sweep_rows_are_exact_and_bounded_below():
    rows = run_sweep(small_config())
    assert [r.p for r in rows] == [0.0, 0.05, 0.1]
    for r in rows:
        assert r.all_exact
        for st in r.tests.values():
            assert st.count == 8 and st.mean >= 1


def test_seed_changes_draws_but_not_distribution():
    a = run_sweep(small_config(p_grid=[0.1], trials=200, seed=1))[0]
    b = run_sweep(small_config(p_grid=[0.1], trials=200, seed=2))[0]
    assert a.tests[BINARY_SPLITTING].mean != b.tests[BINARY_SPLITTING].mean
    for alg in (BINARY_SPLITTING, GRAPH_AWARE):
        sa, sb = a.tests[alg], b.tests[alg]
        assert abs(sa.mean - sb.mean) < 4 * math.hypot(sa.std_error, sb.std_error)


def test_sweep_independent_of_worker_count():
    one = run_sweep(small_config(workers=1))
    many = run_sweep(small_config(workers=4))
    for a, b in zip(one, many):
        assert a.tests == b.tests and a.lb_estimate == b.lb_estimate


def test_csv_roundtrip(tmp_path):
    rows = run_sweep(small_config())
    path = emit_csv(rows, tmp_path / "out.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines()[0] == ",".join(CSV_HEADER)
    recs = read_csv(path)
    assert len(recs) == len(rows) * 2
    for rec, (row, alg) in zip(recs, [(r, a) for r in rows for a in r.tests]):
        assert rec["alg"] == alg
        assert rec["p"] == pytest.approx(row.p, abs=1e-6)
        assert rec["mean_tests"] == pytest.approx(row.tests[alg].mean, abs=1e-6)
        assert rec["ub"] == pytest.approx(row.upper_bound(alg), abs=1e-6)
        assert rec["lb"] == pytest.approx(row.lb_estimate, abs=1e-6)


def test_empty_rows_write_nothing(tmp_path):
    target = tmp_path / "none.csv"
    with pytest.raises(DomainError):
        emit_csv([], target)
    assert not target.exists()


def test_relative_reduction():
    row = run_sweep(small_config(p_grid=[0.0]))[0]
    assert relative_reduction(row) == 0.0


# command line

def test_cli_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"netgt {__version__} (csv schema 1)"


def test_cli_bad_flag_exits_2(capsys):
    assert main(["simulate", "--frobnicate"]) == 2
    assert "frobnicate" in capsys.readouterr().err


def test_cli_domain_error_exits_2(capsys):
    assert main(["simulate", "--n", "10", "--k", "3"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_config_error_exits_2(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("trials = 0\n")
    assert main(["experiment", "--config", str(cfg)]) == 2
    assert "trials" in capsys.readouterr().err


def test_cli_simulate_zero_probability(tmp_path, capsys):
    tpath = tmp_path / "t.txt"
    assert main(["simulate", "--n", "40", "--k", "8", "--p", "0", "--transcript", str(tpath)]) == 0
    out = capsys.readouterr().out
    assert "binary-splitting: 1 tests" in out
    assert "graph-aware: 1 tests" in out
    assert "exact recovery: True" in out
    assert tpath.read_text().count("# ") == 2


def test_cli_bounds_single_row(capsys):
    assert main(["bounds", "--p", "0.05", "--samples", "2000", "--header"]) == 0
    out = capsys.readouterr()
    lines = out.out.strip().splitlines()
    assert len(lines) == 2 and lines[0].startswith("n,k,p")
    assert lines[1].split(",")[:2] == ["1000", "20"]
    assert out.err


def test_cli_regimes(capsys):
    argv = ["regimes", "--n", "1000000", "--k", "10", "--p", "1e-5", "--q1", "0.5", "--q2", "0"]
    assert main(argv) == 0
    assert "improvement" in capsys.readouterr().out.lower()


def test_cli_experiment_is_byte_reproducible(tmp_path):
    args = ["experiment", "--n", "60", "--k", "6", "--q1", "0.3", "--q2", "0.02",
            "--p-grid", "0,0.05", "--trials", "5", "--mc-samples", "300", "--seed", "4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    png = a.with_suffix(".png")
    assert png.exists() and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_experiment_stdout_no_plot(tmp_path, capsys):
    args = ["experiment", "--n", "20", "--k", "5", "--p-grid", "0.1", "--trials", "2",
            "--mc-samples", "100", "--algorithms", "graph-aware"]
    assert main(args) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 2 and ",graph-aware," in lines[1]
