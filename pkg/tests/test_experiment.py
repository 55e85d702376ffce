import statistics

import pytest

from fullprop.core import Rule
from fullprop.experiment import (
    ConfigError,
    format_summary_table,
    parse_config,
    read_bench_csv,
    run_bench,
    run_experiment,
    summarize,
    write_bench_csv,
    write_summary_csv,
)
from fullprop.io import read_results_csv, write_results_csv

CONFIG = """
# small mixed run
model = urn
m = 6
n = 20, 21
k = 2
rules = monroe, cc
algorithms = a, c, gm, cc:p, r
trials = 3
seed = 10
exact = true
d = 4
samples = 12
"""


def test_parse_config():
    cfg = parse_config(CONFIG)
    assert cfg.generator.model == "urn"
    assert cfg.points == [(6, 20, 2), (6, 21, 2)]
    assert cfg.runs == [
        (Rule.MONROE, "a"), (Rule.MONROE, "c"), (Rule.CC, "c"), (Rule.MONROE, "gm"),
        (Rule.CC, "gm"), (Rule.CC, "p"), (Rule.MONROE, "r"), (Rule.CC, "r"),
    ]
    assert cfg.trials == 3 and cfg.seed == 10 and cfg.exact and cfg.d == 4


def test_k_over_m_and_points():
    cfg = parse_config("m = 100\nn = 1000\nk_over_m = 0.1, 0.5\nalgorithms = a\n")
    assert cfg.points == [(100, 1000, 10), (100, 1000, 50)]
    cfg = parse_config("points = 10:100:3; 12:50:4\nrules = cc\nalgorithms = c\n")
    assert cfg.points == [(10, 100, 3), (12, 50, 4)]


def test_psf_file_in_config(tmp_path):
    (tmp_path / "courses.txt").write_text("3 3 3 2 1 0\n")
    cfg = parse_config("m = 6\nn = 10\nk = 2\nrules = cc\nalgorithms = gm\npsf = courses.txt\n", tmp_path)
    assert cfg.psf == "courses"
    assert cfg.scoring(6).alpha == (3, 3, 3, 2, 1, 0)
    recs = run_experiment(cfg)
    assert recs[0].psf == "courses" and recs[0].c_ideal == 30


@pytest.mark.parametrize(
    "text,key",
    [
        ("m = 6\nn = 10\nk = 2\nalgorithms = p\n", "algorithms"),
        ("m = 6\nn = 10\nk = 2\nrules = cc\nalgorithms = monroe:p\n", "algorithms"),
        ("m = 6\nn = 10\nk = 2\n", "algorithms"),
        ("m = 6\nk = 2\nalgorithms = a\n", "n"),
        ("m = 6\nn = 10\nk = 9\nalgorithms = a\n", "points"),
        ("m = 6\nn = 1\nk = 2\nalgorithms = a\n", "points"),
        ("m = 40\nn = 30\nk = 20\nalgorithms = a\nexact = true\n", "exact"),
        ("m = 6\nn = 10\nk = 2\nalgorithms = a\ntrials = 0\n", "trials"),
        ("m = 6\nn = 10\nk = 2\nalgorithms = a\ncolour = red\n", "colour"),
        ("m = 6\nn = 10\nk = 2\nalgorithms = a\nmodel = netflix\n", "model"),
        ("m = 6\nn = ten\nk = 2\nalgorithms = a\n", "n"),
        ("m 6\n", "m 6"),
    ],
)
def test_config_errors(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_run_experiment_records():
    cfg = parse_config(CONFIG)
    recs = run_experiment(cfg)
    assert len(recs) == 2 * 3 * len(cfg.runs)
    # ordered by (point, trial)
    assert [r.n for r in recs[: 3 * len(cfg.runs)]] == [20] * (3 * len(cfg.runs))
    assert [r.seed for r in recs[: len(cfg.runs)]] == [10] * len(cfg.runs)
    for r in recs:
        assert r.c_opt is not None and 0 < r.ratio_opt <= 1
        assert 0 <= r.ratio_ideal <= 1
        assert (r.d is not None) == (r.algorithm == "c")
        assert (r.samples is not None) == (r.algorithm == "r")
    assert read_results_csv(write_results_csv(recs)) == recs


def test_parallel_matches_serial():
    cfg = parse_config(CONFIG)
    serial = [r.without_timing() for r in run_experiment(cfg)]
    cfg.workers = 2
    assert [r.without_timing() for r in run_experiment(cfg)] == serial


def test_summary_means():
    recs = run_experiment(parse_config(CONFIG))
    rows = summarize(recs)
    assert len(rows) == 2 * len(parse_config(CONFIG).runs)
    for row in rows:
        group = [r for r in recs if (r.n, r.rule, r.algorithm) == (row.n, row.rule, row.algorithm)]
        assert row.trials == 3
        assert round(row.mean_ratio_ideal, 6) == round(statistics.fmean(r.ratio_ideal for r in group), 6)
        assert row.sd_ratio_ideal == pytest.approx(statistics.stdev(r.ratio_ideal for r in group))
    text = write_summary_csv(rows)
    assert text.splitlines()[0].startswith("m,n,K,rule,algorithm,trials,mean_ratio_ideal")
    assert "C/Cideal" in format_summary_table(rows)


def test_bench_round_trip():
    rows = run_bench([(8, 40, 2)], [(Rule.MONROE, "a"), (Rule.MONROE, "gm")], reps=3)
    assert [r.algorithm for r in rows] == ["a", "gm"]
    for r in rows:
        assert r.min_ms <= r.median_ms <= r.max_ms
    back = read_bench_csv(write_bench_csv(rows))
    assert [(b.algorithm, b.m, b.reps) for b in back] == [("a", 8, 3), ("gm", 8, 3)]
    with pytest.raises(ValueError):
        run_bench([(8, 40, 2)], [(Rule.MONROE, "a")], reps=2)
