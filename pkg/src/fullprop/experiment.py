"""Batched quality experiments and runtime benchmarks.

Experiment configs are flat ``key = value`` files (``#`` starts a comment).
List values are comma separated. Recognized keys:

=============  ==============================================================
model          ``ic`` | ``urn`` | ``mallows`` | ``mixture`` (default ``ic``)
urn_ratio      urn reinforcement ``a/m!`` (default 0.05)
phi, center    Mallows dispersion and center ranking (``mallows`` only)
components     mixture size (default 5)
m, n           lists; every combination is a sweep point
k              list of committee sizes, or
k_over_m       list of ratios; ``K = round(ratio * m)``
points         explicit ``m:n:K`` triples separated by ``;`` (overrides m/n/k)
rules          ``monroe`` and/or ``cc``
algorithms     ``a b c gm p r``, each run under every listed rule that
               supports it; ``rule:alg`` restricts an entry to one rule
psf            ``borda`` or a path to a scoring-vector file
trials         trials per point (default 1)
seed           base seed; trial ``t`` uses ``seed + t`` (default 0)
exact          ``true`` to compute the optimum (needs C(m,K) <= exact_limit)
exact_limit    enumeration cap (default 2000000)
d, samples     beam width (15) and random-sampling draws (100)
workers        processes used to run trials (default 1)
=============  ==============================================================
"""

from __future__ import annotations

import itertools
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .algorithms import ALGORITHMS, DEFAULT_BEAM_WIDTH, DEFAULT_SAMPLES, solve
from .core import Rule, ScoringFunction, borda_psf, ideal_satisfaction
from .datagen import GeneratorSpec
from .exact import DEFAULT_SUBSET_LIMIT, ExactConfig, exact_solver
from .io import ResultRecord, read_psf


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass
class ExperimentConfig:
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    points: list = field(default_factory=list)
    runs: list = field(default_factory=list)
    psf: str = "borda"
    trials: int = 1
    seed: int = 0
    exact: bool = False
    exact_limit: int = DEFAULT_SUBSET_LIMIT
    d: int = DEFAULT_BEAM_WIDTH
    samples: int = DEFAULT_SAMPLES
    workers: int = 1
    psf_vector: Optional[ScoringFunction] = None

    def validate(self) -> "ExperimentConfig":
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if not self.points:
            raise ConfigError("points", "no sweep points given")
        if not self.runs:
            raise ConfigError("algorithms", "no algorithms given")
        if self.d < 1:
            raise ConfigError("d", "must be >= 1")
        if self.samples < 1:
            raise ConfigError("samples", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        rules = {rule for rule, _ in self.runs}
        for m, n, K in self.points:
            if m < 1 or n < 1:
                raise ConfigError("points", f"invalid point m={m}, n={n}")
            if not 1 <= K <= m:
                raise ConfigError("points", f"K={K} out of range for m={m}")
            if Rule.MONROE in rules and n < K:
                raise ConfigError("points", f"Monroe needs n >= K (n={n}, K={K})")
            if self.exact and math.comb(m, K) > self.exact_limit:
                raise ConfigError("exact", f"C({m},{K}) exceeds exact_limit={self.exact_limit}")
            if self.psf_vector is not None and self.psf_vector.m != m:
                raise ConfigError("psf", f"scoring vector has length {self.psf_vector.m}, point has m={m}")
        return self

    def scoring(self, m: int) -> ScoringFunction:
        return self.psf_vector if self.psf_vector is not None else borda_psf(m)


def _split(value: str) -> list:
    return [v.strip() for v in value.split(",") if v.strip()]


def _ints(key: str, value: str) -> list:
    try:
        return [int(v) for v in _split(value)]
    except ValueError:
        raise ConfigError(key, f"expected integers, got {value!r}") from None


def _num(key: str, value: str, kind=int):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {value!r}") from None


def _bool(key: str, value: str) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected true/false, got {value!r}")


def _runs(rules: list, algorithms: list) -> list:
    runs = []
    for entry in algorithms:
        if ":" in entry:
            rule_text, alg = entry.split(":", 1)
            try:
                targets = [Rule.parse(rule_text)]
            except ValueError as exc:
                raise ConfigError("algorithms", str(exc)) from None
            alg = alg.lower()
            if alg not in ALGORITHMS[targets[0]]:
                raise ConfigError("algorithms", f"{alg!r} does not apply to rule {rule_text!r}")
        else:
            # a bare name runs under every listed rule that supports it
            alg = entry.lower()
            targets = [rule for rule in rules if alg in ALGORITHMS[rule]]
            if not targets:
                names = ", ".join(rule.value for rule in rules)
                raise ConfigError("algorithms", f"{alg!r} does not apply to rule(s) {names}")
        for rule in targets:
            if (rule, alg) not in runs:
                runs.append((rule, alg))
    return runs


KNOWN_KEYS = {
    "model", "urn_ratio", "phi", "center", "components", "m", "n", "k", "k_over_m",
    "points", "rules", "rule", "algorithms", "psf", "trials", "seed", "exact",
    "exact_limit", "d", "samples", "workers",
}


def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep:
            raise ConfigError(key or f"line {number}", "expected 'key = value'")
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        values[key] = value.strip()

    try:
        gen = GeneratorSpec(
            model=values.get("model", "ic").lower(),
            urn_ratio=_num("urn_ratio", values.get("urn_ratio", "0.05"), float),
            phi=_num("phi", values.get("phi", "0.5"), float),
            center=tuple(_ints("center", values["center"])) if "center" in values else None,
            components=_num("components", values.get("components", "5")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("model", str(exc)) from None

    if "points" in values:
        points = []
        for item in values["points"].split(";"):
            parts = item.strip().split(":")
            if len(parts) != 3:
                raise ConfigError("points", f"expected m:n:K, got {item.strip()!r}")
            points.append(tuple(_num("points", p.strip()) for p in parts))
    else:
        for key in ("m", "n"):
            if key not in values:
                raise ConfigError(key, "missing (or give 'points')")
        ms, ns = _ints("m", values["m"]), _ints("n", values["n"])
        if "k" in values:
            ks = _ints("k", values["k"])
            points = [(m, n, k) for m, n, k in itertools.product(ms, ns, ks)]
        elif "k_over_m" in values:
            try:
                ratios = [float(v) for v in _split(values["k_over_m"])]
            except ValueError:
                raise ConfigError("k_over_m", "expected numbers") from None
            points = [(m, n, round(r * m)) for m, n, r in itertools.product(ms, ns, ratios)]
        else:
            raise ConfigError("k", "missing (or give 'k_over_m' or 'points')")

    try:
        rules = [Rule.parse(r) for r in _split(values.get("rules", values.get("rule", "monroe")))]
    except ValueError as exc:
        raise ConfigError("rules", str(exc)) from None
    if "algorithms" not in values:
        raise ConfigError("algorithms", "missing")
    runs = _runs(rules, _split(values["algorithms"]))

    psf_name = values.get("psf", "borda")
    psf_vector = None
    if psf_name.lower() != "borda":
        path = Path(psf_name)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            psf_vector = read_psf(path.read_text(), name=path.stem)
        except (OSError, ValueError) as exc:
            raise ConfigError("psf", str(exc)) from None
        psf_name = path.stem

    return ExperimentConfig(
        generator=gen,
        points=points,
        runs=runs,
        psf=psf_name,
        trials=_num("trials", values.get("trials", "1")),
        seed=_num("seed", values.get("seed", "0")),
        exact=_bool("exact", values.get("exact", "false")),
        exact_limit=_num("exact_limit", values.get("exact_limit", str(DEFAULT_SUBSET_LIMIT))),
        d=_num("d", values.get("d", str(DEFAULT_BEAM_WIDTH))),
        samples=_num("samples", values.get("samples", str(DEFAULT_SAMPLES))),
        workers=_num("workers", values.get("workers", "1")),
        psf_vector=psf_vector,
    ).validate()


def run_trial(config: ExperimentConfig, point: tuple, trial: int) -> list:
    """Every configured run on one freshly generated profile."""
    m, n, K = point
    seed = config.seed + trial
    profile = config.generator.generate(m, n, seed)
    psf = config.scoring(m)
    c_ideal = ideal_satisfaction(profile, psf)
    optimum = {}
    if config.exact:
        for rule in dict.fromkeys(rule for rule, _ in config.runs):
            optimum[rule] = exact_solver(
                profile, psf, K, rule, ExactConfig(rule, config.exact_limit)
            ).satisfaction
    records = []
    for rule, alg in config.runs:
        result = solve(profile, psf, K, rule, alg, d=config.d, samples=config.samples, seed=seed)
        records.append(
            ResultRecord(
                algorithm=alg,
                rule=rule.value,
                psf=config.psf,
                m=m,
                n=n,
                K=K,
                d=config.d if alg == "c" else None,
                samples=config.samples if alg == "r" else None,
                seed=seed,
                satisfaction=result.satisfaction,
                c_ideal=c_ideal,
                c_opt=optimum.get(rule),
                time_ms=round(result.elapsed, 3),
            )
        )
    return records


def _trial_job(args):
    config, point, trial = args
    return run_trial(config, point, trial)


def run_experiment(config: ExperimentConfig) -> list:
    """Records ordered by (point, trial, run), whatever order the trials finish in."""
    jobs = [(config, p, t) for p in config.points for t in range(config.trials)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            batches = list(pool.map(_trial_job, jobs, chunksize=max(1, len(jobs) // (8 * config.workers))))
    else:
        batches = [_trial_job(job) for job in jobs]
    return [rec for batch in batches for rec in batch]


@dataclass
class SummaryRow:
    m: int
    n: int
    K: int
    rule: str
    algorithm: str
    trials: int
    mean_ratio_ideal: float
    sd_ratio_ideal: float
    mean_ratio_opt: Optional[float]
    sd_ratio_opt: Optional[float]
    mean_time_ms: float


def _mean_sd(values: list) -> tuple:
    if not values:
        return None, None
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return statistics.fmean(values), sd


def summarize(records: list) -> list:
    groups = {}
    for rec in records:
        groups.setdefault((rec.m, rec.n, rec.K, rec.rule, rec.algorithm), []).append(rec)
    rows = []
    for (m, n, K, rule, alg), recs in groups.items():
        mi, si = _mean_sd([r.ratio_ideal for r in recs])
        opts = [r.ratio_opt for r in recs if r.ratio_opt is not None]
        mo, so = _mean_sd(opts)
        rows.append(
            SummaryRow(m, n, K, rule, alg, len(recs), mi, si, mo, so,
                       statistics.fmean(r.time_ms for r in recs))
        )
    return rows


SUMMARY_HEADER = (
    "m,n,K,rule,algorithm,trials,mean_ratio_ideal,sd_ratio_ideal,"
    "mean_ratio_opt,sd_ratio_opt,mean_time_ms"
)


def write_summary_csv(rows: list) -> str:
    def f(x):
        return "" if x is None else f"{x:.6f}"

    lines = [SUMMARY_HEADER]
    for r in rows:
        lines.append(
            f"{r.m},{r.n},{r.K},{r.rule},{r.algorithm},{r.trials},"
            f"{f(r.mean_ratio_ideal)},{f(r.sd_ratio_ideal)},"
            f"{f(r.mean_ratio_opt)},{f(r.sd_ratio_opt)},{r.mean_time_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def format_summary_table(rows: list) -> str:
    head = f"{'m':>5} {'n':>6} {'K':>4} {'rule':<7}{'alg':<5}{'trials':>6}  {'C/Cideal':>15}  {'C/Copt':>15}  {'ms':>9}"
    out = [head, "-" * len(head)]
    for r in rows:
        opt = "-" if r.mean_ratio_opt is None else f"{r.mean_ratio_opt:.4f}±{r.sd_ratio_opt:.4f}"
        out.append(
            f"{r.m:>5} {r.n:>6} {r.K:>4} {r.rule:<7}{r.algorithm:<5}{r.trials:>6}  "
            f"{r.mean_ratio_ideal:.4f}±{r.sd_ratio_ideal:.4f}  {opt:>15}  {r.mean_time_ms:>9.2f}"
        )
    return "\n".join(out)


# ---------------------------------------------------------------------------
# runtime benchmark


BENCH_HEADER = "algorithm,rule,m,n,K,reps,median_ms,min_ms,max_ms"


@dataclass
class BenchRow:
    algorithm: str
    rule: str
    m: int
    n: int
    K: int
    reps: int
    median_ms: float
    min_ms: float
    max_ms: float


def run_bench(
    grid: list,
    runs: list,
    generator: Optional[GeneratorSpec] = None,
    reps: int = 3,
    seed: int = 0,
    d: int = DEFAULT_BEAM_WIDTH,
    samples: int = DEFAULT_SAMPLES,
) -> list:
    """Median wall time of ``reps`` timed runs per (algorithm, point), after one warm-up run."""
    if reps < 3:
        raise ValueError("at least 3 repetitions are required")
    generator = generator or GeneratorSpec()
    rows = []
    for m, n, K in grid:
        profile = generator.generate(m, n, seed)
        psf = borda_psf(m)
        for rule, alg in runs:
            solve(profile, psf, K, rule, alg, d=d, samples=samples, seed=seed)
            times = []
            for _ in range(reps):
                t0 = time.perf_counter()
                solve(profile, psf, K, rule, alg, d=d, samples=samples, seed=seed)
                times.append((time.perf_counter() - t0) * 1000.0)
            rows.append(BenchRow(alg, rule.value, m, n, K, reps,
                                 statistics.median(times), min(times), max(times)))
    return rows


def write_bench_csv(rows: list) -> str:
    lines = [BENCH_HEADER]
    for r in rows:
        lines.append(
            f"{r.algorithm},{r.rule},{r.m},{r.n},{r.K},{r.reps},"
            f"{r.median_ms:.3f},{r.min_ms:.3f},{r.max_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def read_bench_csv(text: str) -> list:
    lines = text.strip().splitlines()
    if not lines or lines[0] != BENCH_HEADER:
        raise ValueError("unexpected benchmark header")
    rows = []
    for line in lines[1:]:
        alg, rule, m, n, K, reps, med, lo, hi = line.split(",")
        rows.append(BenchRow(alg, rule, int(m), int(n), int(K), int(reps),
                             float(med), float(lo), float(hi)))
    return rows
