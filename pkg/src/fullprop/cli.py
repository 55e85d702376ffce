"""Command-line entry point: ``fullprop generate|solve|experiment|bench``.

Exit codes: 0 on success, 1 for usage or configuration errors, 2 when an
instance exceeds a size limit (e.g. exact enumeration).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .algorithms import ALGORITHMS, DEFAULT_BEAM_WIDTH, DEFAULT_SAMPLES, solve
from .assign import SizeLimitError
from .core import Rule, borda_psf, ideal_satisfaction
from .datagen import GeneratorSpec
from .exact import DEFAULT_SUBSET_LIMIT, ExactConfig, exact_solver
from .experiment import (
    ConfigError,
    format_summary_table,
    parse_config,
    run_bench,
    run_experiment,
    summarize,
    write_bench_csv,
    write_summary_csv,
)
from .io import ResultRecord, read_profile, read_psf, write_profile, write_results_csv

EXIT_USAGE = 1
EXIT_LIMIT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fullprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a synthetic profile")
    gen.add_argument("--model", choices=GeneratorSpec.MODELS, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="output file (default: stdout)")
    gen.add_argument("--urn-ratio", type=float, default=0.05)
    gen.add_argument("--phi", type=float, default=0.5)
    gen.add_argument("--center", type=_int_list, help="comma-separated center ranking")
    gen.add_argument("--components", type=int, default=5)

    sol = sub.add_parser("solve", help="solve one profile")
    sol.add_argument("--profile", type=Path, required=True)
    sol.add_argument("--rule", choices=[r.value for r in Rule], required=True)
    sol.add_argument("--alg", choices=["a", "b", "c", "gm", "p", "r", "exact"], required=True)
    sol.add_argument("--k", type=int, required=True)
    sol.add_argument("--d", type=int, default=DEFAULT_BEAM_WIDTH)
    sol.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sol.add_argument("--psf", default="borda", help="'borda' or a scoring-vector file")
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--exact-limit", type=int, default=DEFAULT_SUBSET_LIMIT)
    sol.add_argument("--opt", action="store_true", help="also compute C_opt exactly")
    sol.add_argument("--assignment", type=Path, help="write 'agent alternative' lines here")
    sol.add_argument("--no-header", action="store_true")

    exp = sub.add_parser("experiment", help="run a batched experiment from a config file")
    exp.add_argument("config", type=Path)
    exp.add_argument("--out", type=Path, help="per-trial results CSV (default: stdout)")
    exp.add_argument("--summary", type=Path, help="per-point summary CSV")
    exp.add_argument("--workers", type=int, help="override the config's worker count")
    exp.add_argument("--quiet", action="store_true", help="do not print the summary table")

    bench = sub.add_parser("bench", help="time algorithms on a grid of instances")
    bench.add_argument("--m", type=_int_list, required=True)
    bench.add_argument("--n", type=_int_list, required=True)
    bench.add_argument("--k", type=_int_list, required=True)
    bench.add_argument("--rule", choices=[r.value for r in Rule], required=True)
    bench.add_argument("--algs", default=None, help="comma-separated (default: all for the rule)")
    bench.add_argument("--model", choices=GeneratorSpec.MODELS, default="ic")
    bench.add_argument("--reps", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--d", type=int, default=DEFAULT_BEAM_WIDTH)
    bench.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    bench.add_argument("--out", type=Path)
    return parser


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(args.model, args.urn_ratio, args.phi,
                             tuple(args.center) if args.center else None, args.components)
        profile = spec.generate(args.m, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(write_profile(profile), args.out)
    print(spec.describe(args.m, args.n, args.seed), file=sys.stderr if args.out is None else sys.stdout)
    return 0


def _load_psf(text: str, m: int):
    if text.lower() == "borda":
        return borda_psf(m)
    path = Path(text)
    try:
        psf = read_psf(path.read_text(), name=path.stem)
    except OSError as exc:
        raise UsageError(f"cannot read scoring vector: {exc}") from None
    if psf.m != m:
        raise UsageError(f"scoring vector has length {psf.m}, profile has m={m}")
    return psf


def cmd_solve(args) -> int:
    rule = Rule.parse(args.rule)
    if args.alg != "exact" and args.alg not in ALGORITHMS[rule]:
        raise UsageError(f"--alg {args.alg} does not apply to --rule {rule.value}")
    try:
        profile = read_profile(args.profile.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read profile: {exc}") from None
    psf = _load_psf(args.psf, profile.m)
    if not 1 <= args.k <= profile.m:
        raise UsageError(f"--k must lie in 1..{profile.m}")
    if args.d < 1 or args.samples < 1:
        raise UsageError("--d and --samples must be >= 1")
    exact_cfg = ExactConfig(rule, args.exact_limit)
    if args.alg == "exact":
        result = exact_solver(profile, psf, args.k, rule, exact_cfg)
        c_opt = result.satisfaction
    else:
        result = solve(profile, psf, args.k, rule, args.alg, args.d, args.samples, args.seed)
        c_opt = exact_solver(profile, psf, args.k, rule, exact_cfg).satisfaction if args.opt else None
    record = ResultRecord(
        algorithm=args.alg, rule=rule.value, psf=psf.name, m=profile.m, n=profile.n, K=args.k,
        d=args.d if args.alg == "c" else None,
        samples=args.samples if args.alg == "r" else None,
        seed=args.seed if args.alg == "r" else None,
        satisfaction=result.satisfaction, c_ideal=ideal_satisfaction(profile, psf),
        c_opt=c_opt, time_ms=round(result.elapsed, 3),
    )
    text = write_results_csv([record])
    if args.no_header:
        text = text.split("\n", 1)[1]
    sys.stdout.write(text)
    if args.assignment is not None:
        lines = [f"{i} {a if a is not None else 0}"
                 for i, a in enumerate(result.assignment.as_list(), start=1)]
        args.assignment.write_text("\n".join(lines) + "\n")
    return 0


def cmd_experiment(args) -> int:
    try:
        config = parse_config(args.config.read_text(), base_dir=args.config.parent)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        config.workers = args.workers
    records = run_experiment(config)
    rows = summarize(records)
    _emit(write_results_csv(records), args.out)
    if args.summary is not None:
        args.summary.write_text(write_summary_csv(rows))
    if not args.quiet:
        print(format_summary_table(rows), file=sys.stderr if args.out is None else sys.stdout)
    return 0


def cmd_bench(args) -> int:
    rule = Rule.parse(args.rule)
    algs = args.algs.split(",") if args.algs else list(ALGORITHMS[rule])
    for alg in algs:
        if alg not in ALGORITHMS[rule]:
            raise UsageError(f"algorithm {alg!r} does not apply to rule {rule.value}")
    grid = [(m, n, k) for m in args.m for n in args.n for k in args.k]
    for m, n, k in grid:
        if not 1 <= k <= m or (rule is Rule.MONROE and n < k):
            raise UsageError(f"invalid grid point m={m} n={n} K={k}")
    if args.reps < 3:
        raise UsageError("--reps must be >= 3")
    rows = run_bench(grid, [(rule, a) for a in algs], GeneratorSpec(args.model),
                     args.reps, args.seed, args.d, args.samples)
    _emit(write_bench_csv(rows), args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "experiment": cmd_experiment,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SizeLimitError as exc:
        print(f"fullprop: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"fullprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
