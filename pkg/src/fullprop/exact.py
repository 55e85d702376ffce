"""Exact winners by exhaustive enumeration of all K-subsets."""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assign import SizeLimitError, optimal_cc_assignment, optimal_monroe_assignment
from .algorithms import SolveResult, _check_k
from .core import PreferenceProfile, Rule, ScoringFunction, _check_psf, satisfaction

DEFAULT_SUBSET_LIMIT = 2_000_000


@dataclass(frozen=True)
class ExactConfig:
    rule: Rule = Rule.MONROE
    subset_limit: int = DEFAULT_SUBSET_LIMIT
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule.parse(self.rule))
        if self.subset_limit < 1:
            raise ValueError("subset_limit must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _best_cc(util: np.ndarray, subsets) -> tuple:
    best_val, best_s = -1, None
    for S in subsets:
        val = int(util[:, [a - 1 for a in S]].max(axis=1).sum())
        if val > best_val:
            best_val, best_s = val, S
    return best_val, best_s


def _best_monroe(profile, psf, K, subsets) -> tuple:
    best_val, best_s = -1, None
    for S in subsets:
        val = satisfaction(profile, psf, optimal_monroe_assignment(profile, psf, S, K))
        if val > best_val:
            best_val, best_s = val, S
    return best_val, best_s


def _scan(args):
    profile, psf, K, rule, lo, hi = args
    subsets = itertools.islice(itertools.combinations(range(1, profile.m + 1), K), lo, hi)
    if rule is Rule.CC:
        return _best_cc(profile.utilities(psf), subsets)
    return _best_monroe(profile, psf, K, subsets)


def exact_solver(
    profile: PreferenceProfile,
    psf: ScoringFunction,
    K: int,
    rule=None,
    config: Optional[ExactConfig] = None,
) -> SolveResult:
    """Optimal committee under ``rule`` by trying every K-subset in lexicographic order.

    Among equally good committees the lexicographically first wins. With
    ``config.workers > 1`` contiguous ranges of subsets are scanned in separate
    processes and merged with the same ordering.
    """
    start = time.perf_counter()
    config = config or ExactConfig()
    rule = Rule.parse(rule) if rule is not None else config.rule
    _check_psf(profile, psf)
    _check_k(profile, K, rule)
    total = math.comb(profile.m, K)
    if total > config.subset_limit:
        raise SizeLimitError(
            f"C({profile.m},{K}) = {total} subsets exceed subset_limit={config.subset_limit}"
        )
    if config.workers == 1 or total < 2 * config.workers:
        results = [_scan((profile, psf, K, rule, 0, total))]
    else:
        bounds = np.linspace(0, total, config.workers + 1).astype(int)
        jobs = [(profile, psf, K, rule, int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:])]
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_scan, jobs))
    # ranges are in lexicographic order, so the first strict maximum is the tie winner
    best_val, best_s = -1, None
    for val, S in results:
        if S is not None and val > best_val:
            best_val, best_s = val, S
    if rule is Rule.CC:
        assignment = optimal_cc_assignment(profile, psf, best_s, K)
    else:
        assignment = optimal_monroe_assignment(profile, psf, best_s, K)
    result = SolveResult(
        committee=frozenset(best_s),
        assignment=assignment,
        satisfaction=satisfaction(profile, psf, assignment),
        elapsed=(time.perf_counter() - start) * 1000.0,
        algorithm="exact",
        rule=rule,
        metadata={"subsets": total},
    )
    return result
