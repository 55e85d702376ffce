"""Committee selection heuristics for the Monroe and Chamberlin-Courant rules.

All ties are broken towards the smallest alternative id, then the smallest
agent id; beam entries with equal satisfaction are ordered by their sorted
winner tuple. Every solver is deterministic given its inputs and seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assign import optimal_cc_assignment, optimal_monroe_assignment
from .bounds import coverage_threshold, sample_count
from .core import Assignment, PreferenceProfile, Rule, ScoringFunction, _check_psf, satisfaction

DEFAULT_BEAM_WIDTH = 15
DEFAULT_SAMPLES = 100


@dataclass
class SolveResult:
    committee: frozenset
    assignment: Assignment
    satisfaction: int
    elapsed: float
    algorithm: str
    rule: Rule
    metadata: dict = field(default_factory=dict)

    @property
    def winners(self) -> frozenset:
        return self.assignment.winners

    def same_outcome(self, other: "SolveResult") -> bool:
        """Equality ignoring wall time."""
        return (
            self.committee == other.committee
            and self.assignment == other.assignment
            and self.satisfaction == other.satisfaction
            and self.algorithm == other.algorithm
            and self.rule == other.rule
            and self.metadata == other.metadata
        )


@dataclass(frozen=True)
class SamplingPlan:
    samples: int = DEFAULT_SAMPLES
    lam: Optional[float] = None
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("at least one sample is required")

    @classmethod
    def from_guarantee(cls, lam: float, epsilon: float, K: int) -> "SamplingPlan":
        return cls(sample_count(lam, epsilon, K), lam, epsilon)


def _check_k(profile: PreferenceProfile, K: int, rule: Rule) -> None:
    if not 1 <= K <= profile.m:
        raise ValueError(f"K={K} out of range 1..{profile.m}")
    if rule is Rule.MONROE and profile.n < K:
        raise ValueError(f"Monroe needs at least K={K} agents, got {profile.n}")


def _finish(profile, psf, committee, assignment, start, algorithm, rule, **meta) -> SolveResult:
    return SolveResult(
        committee=frozenset(int(a) for a in committee),
        assignment=assignment,
        satisfaction=satisfaction(profile, psf, assignment),
        elapsed=(time.perf_counter() - start) * 1000.0,
        algorithm=algorithm,
        rule=rule,
        metadata=meta,
    )


def _optimal(profile, psf, S, K, rule: Rule) -> Assignment:
    if rule is Rule.CC:
        return optimal_cc_assignment(profile, psf, S, K)
    return optimal_monroe_assignment(profile, psf, S, K)


# ---------------------------------------------------------------------------
# Monroe greedy (A, B) and its beam extension (C)


def _grab_scores(pos: np.ndarray, alpha: np.ndarray, q: int) -> np.ndarray:
    """Satisfaction of the ``q`` best-placed agents for every alternative.

    ``pos`` holds the 1-based ranks of the still-unassigned agents only.
    """
    m = pos.shape[1]
    cells = (np.arange(m) * m + pos - 1).ravel()
    counts = np.bincount(cells, minlength=m * m).reshape(m, m)
    cum = np.cumsum(counts, axis=1)
    taken = np.minimum(cum, q)
    per_rank = np.diff(taken, axis=1, prepend=0)
    return per_rank @ alpha


def _grab_agents(unassigned: np.ndarray, pos_col: np.ndarray, q: int) -> np.ndarray:
    """Indices of the ``q`` unassigned agents ranking one alternative highest."""
    idx = np.flatnonzero(unassigned)
    order = np.argsort(pos_col[idx], kind="stable")
    return idx[order[:q]]


def _quota(n_left: int, k_left: int) -> int:
    return -(-n_left // k_left)


@dataclass
class BeamEntry:
    sat_so_far: int
    winners: tuple
    rep: np.ndarray

    @property
    def unassigned(self) -> np.ndarray:
        return self.rep == 0

    def partial(self, K: int) -> Assignment:
        return Assignment(self.rep, Rule.MONROE, K)


def _monroe_beam(profile: PreferenceProfile, psf: ScoringFunction, K: int, d: int) -> list:
    n = profile.n
    pos = profile.positions
    alpha = psf.array
    beam = [BeamEntry(0, (), np.zeros(n, dtype=np.int64))]
    n_left = n
    for step in range(K):
        q = _quota(n_left, K - step)
        n_left -= q
        children = {}
        for entry in beam:
            free = entry.unassigned
            scores = _grab_scores(pos[free], alpha, q)
            used = np.asarray(entry.winners, dtype=np.int64) - 1
            scores[used] = -1
            for a in np.flatnonzero(scores >= 0):
                winners = tuple(sorted(entry.winners + (int(a) + 1,)))
                sat = entry.sat_so_far + int(scores[a])
                known = children.get(winners)
                if known is None or sat > known[0]:
                    children[winners] = (sat, entry, int(a))
        ranked = sorted(children.items(), key=lambda kv: (-kv[1][0], kv[0]))[:d]
        beam = []
        for winners, (sat, parent, a) in ranked:
            rep = parent.rep.copy()
            rep[_grab_agents(parent.unassigned, pos[:, a], q)] = a + 1
            beam.append(BeamEntry(sat, winners, rep))
    return beam


def algorithm_a(profile: PreferenceProfile, psf: ScoringFunction, K: int) -> SolveResult:
    """Greedy Monroe: repeatedly give the best alternative its best ``q`` free agents.

    ``q = ceil(n_left / k_left)`` so the final loads are exactly ``n mod K``
    alternatives at ``ceil(n/K)`` and the rest at ``floor(n/K)``.
    """
    start = time.perf_counter()
    _check_psf(profile, psf)
    _check_k(profile, K, Rule.MONROE)
    (entry,) = _monroe_beam(profile, psf, K, 1)
    return _finish(profile, psf, entry.winners, entry.partial(K), start, "a", Rule.MONROE)


def algorithm_b(profile: PreferenceProfile, psf: ScoringFunction, K: int) -> SolveResult:
    """Algorithm A's committee with an optimal Monroe reassignment."""
    start = time.perf_counter()
    _check_psf(profile, psf)
    _check_k(profile, K, Rule.MONROE)
    (entry,) = _monroe_beam(profile, psf, K, 1)
    assignment = optimal_monroe_assignment(profile, psf, entry.winners, K)
    return _finish(profile, psf, entry.winners, assignment, start, "b", Rule.MONROE)


def algorithm_c_monroe(
    profile: PreferenceProfile, psf: ScoringFunction, K: int, d: int = DEFAULT_BEAM_WIDTH
) -> SolveResult:
    """Beam search over greedy Monroe extensions, keeping ``d`` distinct committees.

    Each surviving committee is optimally reassigned at the end and the best
    one is returned. ``d = 1`` reproduces :func:`algorithm_b`.
    """
    start = time.perf_counter()
    if d < 1:
        raise ValueError("beam width d must be >= 1")
    _check_psf(profile, psf)
    _check_k(profile, K, Rule.MONROE)
    best = None
    for entry in _monroe_beam(profile, psf, K, d):
        assignment = optimal_monroe_assignment(profile, psf, entry.winners, K)
        key = (-satisfaction(profile, psf, assignment), entry.winners)
        if best is None or key < best[0]:
            best = (key, entry.winners, assignment)
    _, winners, assignment = best
    return _finish(profile, psf, winners, assignment, start, "c", Rule.MONROE, d=d, dedup=True)


# ---------------------------------------------------------------------------
# Chamberlin-Courant beam search and greedy marginal improvement


def _cc_beam(util: np.ndarray, K: int, d: int) -> list:
    n, m = util.shape
    beam = [(0, (), np.zeros(n, dtype=np.int64))]
    for _ in range(K):
        children = {}
        for sat, winners, best in beam:
            totals = np.maximum(util, best[:, None]).sum(axis=0)
            for a in range(m):
                if a + 1 in winners:
                    continue
                key = tuple(sorted(winners + (a + 1,)))
                if key not in children:
                    children[key] = (int(totals[a]), best, a)
        ranked = sorted(children.items(), key=lambda kv: (-kv[1][0], kv[0]))[:d]
        beam = [(s, w, np.maximum(b, util[:, a])) for w, (s, b, a) in ranked]
    return beam


def algorithm_c_cc(
    profile: PreferenceProfile, psf: ScoringFunction, K: int, d: int = DEFAULT_BEAM_WIDTH
) -> SolveResult:
    """Keep the ``d`` best distinct committees while growing them one member at a time."""
    start = time.perf_counter()
    if d < 1:
        raise ValueError("beam width d must be >= 1")
    _check_k(profile, K, Rule.CC)
    beam = _cc_beam(profile.utilities(psf), K, d)
    _, winners, _ = beam[0]
    assignment = optimal_cc_assignment(profile, psf, winners, K)
    return _finish(profile, psf, winners, assignment, start, "c", Rule.CC, d=d, dedup=True)


def algorithm_gm(
    profile: PreferenceProfile, psf: ScoringFunction, K: int, rule=Rule.CC
) -> SolveResult:
    """Greedy marginal improvement.

    Adds, ``K`` times, the alternative whose inclusion yields the largest
    optimal satisfaction. For Monroe, intermediate committees are scored with
    the ``ceil(n/K)`` upper-bound convention and the last step with the full
    Monroe load bounds.
    """
    start = time.perf_counter()
    rule = Rule.parse(rule)
    _check_k(profile, K, rule)
    if rule is Rule.CC:
        (_, winners, _), = _cc_beam(profile.utilities(psf), K, 1)
        S = list(winners)
    else:
        S = []
        for _ in range(K):
            best_a, best_val = None, -1
            for a in range(1, profile.m + 1):
                if a in S:
                    continue
                val = satisfaction(
                    profile, psf, optimal_monroe_assignment(profile, psf, S + [a], K)
                )
                if val > best_val:
                    best_a, best_val = a, val
            S.append(best_a)
    assignment = _optimal(profile, psf, S, K, rule)
    return _finish(profile, psf, S, assignment, start, "gm", rule)


# ---------------------------------------------------------------------------
# position restriction (P) and random sampling (R)


def algorithm_p(profile: PreferenceProfile, psf: ScoringFunction, K: int) -> SolveResult:
    """Greedy cover of agents by alternatives they rank in their top ``x`` positions.

    ``x = ceil(m W(K) / K)``. The cover itself (covered agents keep the
    alternative that covered them, the others get their favourite member) is
    reported as ``metadata["cover_satisfaction"]``; the returned assignment is
    the optimal CC assignment of the chosen committee, which can only be better.
    """
    start = time.perf_counter()
    _check_psf(profile, psf)
    _check_k(profile, K, Rule.CC)
    x = coverage_threshold(profile.m, K)
    within = profile.positions <= x
    rep = np.zeros(profile.n, dtype=np.int64)
    chosen = []
    for _ in range(K):
        counts = within[rep == 0].sum(axis=0)
        if chosen:
            counts[np.asarray(chosen) - 1] = -1
        a = int(np.argmax(counts)) + 1
        chosen.append(a)
        rep[(rep == 0) & within[:, a - 1]] = a
    left = rep == 0
    if left.any():
        cols = np.asarray(chosen) - 1
        favourite = np.argmin(profile.positions[np.ix_(left, cols)], axis=1)
        rep[left] = cols[favourite] + 1
    cover = satisfaction(profile, psf, Assignment(rep, Rule.CC, K))
    assignment = optimal_cc_assignment(profile, psf, chosen, K)
    return _finish(
        profile, psf, chosen, assignment, start, "p", Rule.CC,
        x=x, borda=psf.is_borda, cover_satisfaction=cover,
    )


def algorithm_r(
    profile: PreferenceProfile,
    psf: ScoringFunction,
    K: int,
    rule=Rule.MONROE,
    plan: Optional[SamplingPlan] = None,
    seed: int = 0,
) -> SolveResult:
    """Best of ``plan.samples`` uniformly random committees, each optimally assigned."""
    start = time.perf_counter()
    rule = Rule.parse(rule)
    plan = plan or SamplingPlan()
    _check_psf(profile, psf)
    _check_k(profile, K, rule)
    rng = np.random.default_rng(seed)
    seen = {}
    for _ in range(plan.samples):
        S = tuple(sorted(int(a) + 1 for a in rng.choice(profile.m, size=K, replace=False)))
        if S not in seen:
            assignment = _optimal(profile, psf, S, K, rule)
            seen[S] = (satisfaction(profile, psf, assignment), assignment)
    S = min(seen, key=lambda s: (-seen[s][0], s))
    return _finish(
        profile, psf, S, seen[S][1], start, "r", rule,
        samples=plan.samples, distinct=len(seen), seed=seed,
    )


ALGORITHMS = {
    Rule.MONROE: ("a", "b", "c", "gm", "r"),
    Rule.CC: ("c", "gm", "p", "r"),
}


def solve(
    profile: PreferenceProfile,
    psf: ScoringFunction,
    K: int,
    rule,
    algorithm: str,
    d: int = DEFAULT_BEAM_WIDTH,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> SolveResult:
    """Run one of the heuristics by its short name (``a b c gm p r``)."""
    rule = Rule.parse(rule)
    alg = algorithm.lower()
    if alg not in ALGORITHMS[rule]:
        raise ValueError(f"algorithm {algorithm!r} does not apply to rule {rule.value!r}")
    if alg == "a":
        return algorithm_a(profile, psf, K)
    if alg == "b":
        return algorithm_b(profile, psf, K)
    if alg == "c":
        if rule is Rule.MONROE:
            return algorithm_c_monroe(profile, psf, K, d)
        return algorithm_c_cc(profile, psf, K, d)
    if alg == "gm":
        return algorithm_gm(profile, psf, K, rule)
    if alg == "p":
        return algorithm_p(profile, psf, K)
    return algorithm_r(profile, psf, K, rule, SamplingPlan(samples), seed)
