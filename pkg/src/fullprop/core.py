"""Election data model: profiles, positional scoring functions and assignments.

Alternatives and agents are numbered from 1 in every public function. Internally
rankings and positions are stored as numpy arrays; the 0-based layout is an
implementation detail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


class Rule(str, Enum):
    MONROE = "monroe"
    CC = "cc"

    @classmethod
    def parse(cls, value) -> "Rule":
        if isinstance(value, Rule):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown rule {value!r}; expected 'monroe' or 'cc'") from None


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class PreferenceProfile:
    """Strict rankings of ``n`` agents over alternatives ``1..m``.

    Parameters
    ----------
    rankings : array-like of shape (n, m)
        Row ``i`` lists agent ``i+1``'s alternatives, most preferred first.
    labels : sequence of str, optional
        Display names, one per alternative. Defaults to the ids as strings.
    """

    __slots__ = ("_rankings", "_positions", "_labels")

    def __init__(self, rankings, labels: Optional[Sequence[str]] = None):
        r = np.array(rankings, dtype=np.int64)
        if r.ndim != 2 or r.shape[0] < 1 or r.shape[1] < 1:
            raise ValueError("rankings must be a non-empty (n, m) array")
        n, m = r.shape
        expected = np.arange(1, m + 1)
        bad = np.flatnonzero((np.sort(r, axis=1) != expected).any(axis=1))
        if bad.size:
            raise ValueError(
                f"ranking of agent {int(bad[0]) + 1} is not a permutation of 1..{m}"
            )
        pos = np.empty_like(r)
        rows = np.arange(n)[:, None]
        pos[rows, r - 1] = np.arange(1, m + 1)
        if labels is None:
            labels = tuple(str(a) for a in range(1, m + 1))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != m:
                raise ValueError(f"expected {m} labels, got {len(labels)}")
        self._rankings = _frozen(r)
        self._positions = _frozen(pos)
        self._labels = labels

    @property
    def n(self) -> int:
        return self._rankings.shape[0]

    @property
    def m(self) -> int:
        return self._rankings.shape[1]

    @property
    def rankings(self) -> np.ndarray:
        """(n, m) array of 1-based alternative ids, read-only."""
        return self._rankings

    @property
    def positions(self) -> np.ndarray:
        """(n, m) array; ``positions[i, a-1]`` is agent ``i+1``'s rank of ``a``."""
        return self._positions

    @property
    def labels(self) -> tuple:
        return self._labels

    def position(self, agent: int, alt: Optional[int]) -> int:
        return position(self, agent, alt)

    def utilities(self, psf: "ScoringFunction") -> np.ndarray:
        """(n, m) matrix whose entry ``[i, a-1]`` is ``alpha[pos_i(a)]``."""
        _check_psf(self, psf)
        return psf.array[self._positions - 1]

    def __eq__(self, other):
        if not isinstance(other, PreferenceProfile):
            return NotImplemented
        return self._labels == other._labels and np.array_equal(
            self._rankings, other._rankings
        )

    def __hash__(self):
        return hash((self._labels, self._rankings.tobytes()))

    def __repr__(self):
        return f"PreferenceProfile(n={self.n}, m={self.m})"


def position(profile: PreferenceProfile, agent: int, alt: Optional[int]) -> int:
    """Rank (1..m) that ``agent`` gives ``alt``; the null alternative ranks ``m``."""
    if not 1 <= agent <= profile.n:
        raise ValueError(f"agent {agent} out of range 1..{profile.n}")
    if alt is None:
        return profile.m
    if not 1 <= alt <= profile.m:
        raise ValueError(f"alternative {alt} out of range 1..{profile.m}")
    return int(profile.positions[agent - 1, alt - 1])


@dataclass(frozen=True)
class ScoringFunction:
    """Positional scoring vector ``alpha[1..m]``: nonincreasing, ending in 0."""

    alpha: tuple
    name: str = "custom"

    def __post_init__(self):
        alpha = tuple(int(x) for x in self.alpha)
        if not alpha:
            raise ValueError("scoring vector must be non-empty")
        if any(x < 0 for x in alpha):
            raise ValueError("scoring vector entries must be nonnegative")
        if alpha[-1] != 0:
            raise ValueError("last scoring vector entry must be 0")
        if any(a < b for a, b in zip(alpha, alpha[1:])):
            raise ValueError("scoring vector must be nonincreasing")
        object.__setattr__(self, "alpha", alpha)

    @property
    def m(self) -> int:
        return len(self.alpha)

    @property
    def top(self) -> int:
        return self.alpha[0]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=np.int64)

    @property
    def is_borda(self) -> bool:
        m = len(self.alpha)
        return self.alpha == tuple(range(m - 1, -1, -1))

    def __getitem__(self, rank: int) -> int:
        """1-based lookup, ``psf[1]`` is the top score."""
        if not 1 <= rank <= len(self.alpha):
            raise IndexError(rank)
        return self.alpha[rank - 1]

    def scaled(self, c: int) -> "ScoringFunction":
        return ScoringFunction(tuple(c * x for x in self.alpha), name=f"{self.name}*{c}")


def borda_psf(m: int) -> ScoringFunction:
    if m < 1:
        raise ValueError("Borda vector needs m >= 1")
    return ScoringFunction(tuple(range(m - 1, -1, -1)), name="borda")


@dataclass(frozen=True, eq=False)
class Assignment:
    """A (possibly partial) representation function.

    ``rep[i]`` holds the alternative representing agent ``i+1``; 0 stands for
    the null alternative.
    """

    rep: np.ndarray
    rule: Rule
    K: int

    def __post_init__(self):
        rep = np.array(self.rep, dtype=np.int64)
        if rep.ndim != 1:
            raise ValueError("rep must be one-dimensional")
        object.__setattr__(self, "rep", _frozen(rep))
        object.__setattr__(self, "rule", Rule.parse(self.rule))
        if len(self.winners) > self.K:
            raise ValueError(f"assignment uses {len(self.winners)} alternatives, K={self.K}")
        if self.rule is Rule.CC and self.winners and self.is_partial:
            raise ValueError("a CC assignment with winners cannot leave agents unassigned")

    @classmethod
    def from_sequence(cls, rep: Iterable[Optional[int]], rule, K: int) -> "Assignment":
        return cls(np.array([0 if a is None else a for a in rep], dtype=np.int64), rule, K)

    @property
    def n(self) -> int:
        return self.rep.shape[0]

    @property
    def winners(self) -> frozenset:
        return frozenset(int(a) for a in np.unique(self.rep) if a != 0)

    @property
    def is_partial(self) -> bool:
        return bool((self.rep == 0).any())

    def __getitem__(self, agent: int) -> Optional[int]:
        a = int(self.rep[agent - 1])
        return None if a == 0 else a

    def as_list(self) -> list:
        return [None if a == 0 else int(a) for a in self.rep]

    def loads(self) -> dict:
        vals, counts = np.unique(self.rep[self.rep != 0], return_counts=True)
        return {int(a): int(c) for a, c in zip(vals, counts)}

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return (self.rule, self.K) == (other.rule, other.K) and np.array_equal(
            self.rep, other.rep
        )

    def __repr__(self):
        return f"Assignment(rule={self.rule.value}, K={self.K}, winners={sorted(self.winners)})"


@dataclass(frozen=True)
class CapacityFunction:
    """Per-alternative load bounds.

    ``cap`` maps alternative ids to upper bounds (missing ids mean 0). With
    ``floor_required`` every alternative in ``cap`` must also receive at least
    ``floor`` agents.
    """

    cap: Mapping[int, int]
    floor_required: bool = False
    floor: int = 0

    def __post_init__(self):
        cap = {int(a): int(c) for a, c in dict(self.cap).items()}
        if any(c < 0 for c in cap.values()):
            raise ValueError("capacities must be nonnegative")
        if self.floor_required and any(c < self.floor for c in cap.values()):
            raise ValueError("capacity below the required floor")
        object.__setattr__(self, "cap", cap)

    def __getitem__(self, alt: int) -> int:
        return self.cap.get(alt, 0)

    def total(self) -> int:
        return sum(self.cap.values())

    def plus(self, alt: int) -> "CapacityFunction":
        """Capacity with one extra unit at ``alt``."""
        cap = dict(self.cap)
        cap[alt] = cap.get(alt, 0) + 1
        return CapacityFunction(cap, self.floor_required, self.floor)

    def __le__(self, other: "CapacityFunction") -> bool:
        keys = set(self.cap) | set(other.cap)
        return all(self[a] <= other[a] for a in keys)

    @classmethod
    def monroe(cls, S: Iterable[int], n: int, K: int) -> "CapacityFunction":
        """The ``ceil(n/K)`` per-member convention, with floors when ``|S| = K``."""
        S = sorted(set(S))
        ceil = -(-n // K)
        full = len(S) == K
        return cls({a: ceil for a in S}, floor_required=full, floor=n // K if full else 0)


def _check_psf(profile: PreferenceProfile, psf: ScoringFunction) -> None:
    if psf.m != profile.m:
        raise ValueError(f"scoring vector has length {psf.m}, profile has m={profile.m}")


def satisfaction(profile: PreferenceProfile, psf: ScoringFunction, assignment: Assignment) -> int:
    """Total satisfaction of an assignment; null entries score ``alpha[m] = 0``."""
    _check_psf(profile, psf)
    if assignment.n != profile.n:
        raise ValueError(f"assignment covers {assignment.n} agents, profile has {profile.n}")
    rep = assignment.rep
    if rep.size and (rep.min() < 0 or rep.max() > profile.m):
        raise ValueError("assignment refers to an unknown alternative")
    mask = rep != 0
    if not mask.any():
        return 0
    ranks = profile.positions[np.flatnonzero(mask), rep[mask] - 1]
    # python int sum: no overflow regardless of n and alpha magnitudes
    return int(sum(psf.array[ranks - 1].tolist()))


def ideal_satisfaction(profile: PreferenceProfile, psf: ScoringFunction) -> int:
    _check_psf(profile, psf)
    return profile.n * psf.top


@dataclass
class MonroeReport:
    ok: bool
    partial: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_monroe(assignment: Assignment, n: int, K: int) -> MonroeReport:
    """Check the Monroe load profile of ``assignment``.

    Complete assignments need exactly ``K`` winners, each serving between
    ``floor(n/K)`` and ``ceil(n/K)`` agents. Partial assignments are only
    checked against the upper bound.
    """
    violations = []
    if assignment.n != n:
        violations.append(f"assignment covers {assignment.n} agents, expected {n}")
    lo, hi = n // K, -(-n // K)
    loads = assignment.loads()
    partial = assignment.is_partial
    if not partial and len(loads) != K:
        violations.append(f"{len(loads)} winners, expected {K}")
    for a, load in sorted(loads.items()):
        if load > hi:
            violations.append(f"alternative {a} serves {load} > {hi} agents")
        if not partial and load < lo:
            violations.append(f"alternative {a} serves {load} < {lo} agents")
    return MonroeReport(ok=not violations, partial=partial, violations=violations)
