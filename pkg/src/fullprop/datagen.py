"""Synthetic preference profiles: impartial culture, Polya urn and Mallows mixtures.

Randomness comes from numpy's PCG64. A seed is expanded with
``SeedSequence(seed).spawn(2)``: the first child stream draws model parameters
(mixture vectors), the second draws the votes, one vote after another. The
same seed therefore always yields the same profile, and changing ``n`` never
changes the mixture parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import PreferenceProfile

DEFAULT_URN_RATIO = 0.05
DEFAULT_COMPONENTS = 5


def _streams(seed: int):
    params, votes = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(params)), np.random.Generator(np.random.PCG64(votes))


def _check_dims(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")


def kendall_tau(r1: Sequence[int], r2: Sequence[int]) -> int:
    """Number of pairs the two rankings order differently."""
    r1, r2 = list(r1), list(r2)
    if len(r1) != len(r2) or set(r1) != set(r2) or len(set(r1)) != len(r1):
        raise ValueError("rankings must be permutations of the same alternatives")
    where = {a: i for i, a in enumerate(r2)}
    seq = [where[a] for a in r1]
    # inversions of seq via a Fenwick tree
    size = len(seq)
    tree = [0] * (size + 1)
    inversions = 0
    for seen, v in enumerate(seq):
        i, below = v + 1, 0
        while i > 0:
            below += tree[i]
            i -= i & -i
        inversions += seen - below
        i = v + 1
        while i <= size:
            tree[i] += 1
            i += i & -i
    return inversions


def gen_impartial_culture(m: int, n: int, seed: int = 0) -> PreferenceProfile:
    """``n`` independent uniformly random rankings."""
    _check_dims(m, n)
    _, rng = _streams(seed)
    base = np.tile(np.arange(1, m + 1), (n, 1))
    return PreferenceProfile(rng.permuted(base, axis=1))


@dataclass(frozen=True)
class UrnParams:
    """Polya-Eggenberger urn; ``ratio`` is the number of copies returned, over ``m!``."""

    ratio: float = DEFAULT_URN_RATIO

    def __post_init__(self):
        if self.ratio < 0:
            raise ValueError("urn ratio must be >= 0")

    def derived_a(self, m: int) -> float:
        return self.ratio * math.factorial(m)


def gen_urn(m: int, n: int, seed: int = 0, params: Optional[UrnParams] = None) -> PreferenceProfile:
    """Urn profile without materializing the ``m!`` orders.

    Vote ``t+1`` is a fresh uniform order with probability ``m!/(m! + t*a)``,
    i.e. ``1/(1 + t*ratio)``; otherwise it copies a uniformly chosen earlier vote.
    """
    _check_dims(m, n)
    params = params or UrnParams()
    _, rng = _streams(seed)
    votes = np.empty((n, m), dtype=np.int64)
    for t in range(n):
        if t == 0 or rng.random() < 1.0 / (1.0 + t * params.ratio):
            votes[t] = rng.permutation(np.arange(1, m + 1))
        else:
            votes[t] = votes[rng.integers(t)]
    return PreferenceProfile(votes)


def _insertion_probs(m: int, phi: float) -> list:
    """Row ``j`` (0-based) gives the insertion-slot distribution for the ``j+1``-th item."""
    rows = []
    for j in range(1, m + 1):
        # slot i (0-based) gets phi**(j-1-i); 0**0 == 1 keeps phi = 0 well defined
        w = np.array([phi ** (j - 1 - i) for i in range(j)], dtype=float)
        rows.append(w / w.sum())
    return rows


def _sample_mallows(rng, center: Sequence[int], phi: float, count: int) -> np.ndarray:
    m = len(center)
    probs = _insertion_probs(m, phi)
    slots = np.empty((count, m), dtype=np.int64)
    for j in range(m):
        slots[:, j] = rng.choice(j + 1, size=count, p=probs[j])
    out = np.empty((count, m), dtype=np.int64)
    for v in range(count):
        order = []
        for j, slot in enumerate(slots[v].tolist()):
            order.insert(slot, center[j])
        out[v] = order
    return out


def _check_center(center, m: int) -> list:
    center = [int(a) for a in center]
    if sorted(center) != list(range(1, m + 1)):
        raise ValueError(f"center must be a permutation of 1..{m}")
    return center


def gen_mallows(
    m: int, n: int, center: Optional[Sequence[int]] = None, phi: float = 0.5, seed: int = 0
) -> PreferenceProfile:
    """Mallows profile around ``center`` by repeated insertion.

    The ``j``-th alternative of the center is inserted at position ``i <= j``
    with probability proportional to ``phi**(j-i)``.
    """
    _check_dims(m, n)
    if not 0.0 <= phi <= 1.0:
        raise ValueError("phi must lie in [0, 1]")
    center = _check_center(center if center is not None else range(1, m + 1), m)
    _, rng = _streams(seed)
    return PreferenceProfile(_sample_mallows(rng, center, phi, n))


@dataclass(frozen=True)
class MixtureParams:
    lambdas: tuple
    phis: tuple
    centers: tuple
    lambda_rule: str = "given"

    def __post_init__(self):
        lambdas = tuple(float(x) for x in self.lambdas)
        phis = tuple(float(x) for x in self.phis)
        centers = tuple(tuple(int(a) for a in c) for c in self.centers)
        if not (len(lambdas) == len(phis) == len(centers) >= 1):
            raise ValueError("lambdas, phis and centers must have the same positive length")
        if any(x < 0 for x in lambdas) or abs(sum(lambdas) - 1.0) > 1e-12:
            raise ValueError("lambdas must be nonnegative and sum to 1")
        if any(not 0.0 <= p <= 1.0 for p in phis):
            raise ValueError("every phi must lie in [0, 1]")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "centers", centers)

    @property
    def components(self) -> int:
        return len(self.lambdas)

    @classmethod
    def random(cls, m: int, rng, components: int = DEFAULT_COMPONENTS) -> "MixtureParams":
        """Weights are normalized independent uniforms, dispersions uniform on [0, 1]."""
        raw = rng.random(components)
        lambdas = raw / raw.sum()
        # renormalize in python floats so the sum check is exact enough
        lambdas = [float(x) for x in lambdas]
        lambdas[-1] = 1.0 - sum(lambdas[:-1])
        phis = rng.random(components)
        centers = [rng.permutation(np.arange(1, m + 1)) for _ in range(components)]
        return cls(tuple(lambdas), tuple(phis), tuple(centers), lambda_rule="normalized-uniform")


def gen_mallows_mixture(
    m: int,
    n: int,
    seed: int = 0,
    params: Union[MixtureParams, str] = "random",
    components: int = DEFAULT_COMPONENTS,
) -> PreferenceProfile:
    """Each vote picks component ``i`` with probability ``lambdas[i]`` and samples its Mallows model."""
    _check_dims(m, n)
    param_rng, rng = _streams(seed)
    if isinstance(params, str):
        if params != "random":
            raise ValueError("params must be MixtureParams or 'random'")
        params = MixtureParams.random(m, param_rng, components)
    for c in params.centers:
        _check_center(c, m)
    if params.components == 1:
        picks = np.zeros(n, dtype=np.int64)
    else:
        picks = rng.choice(params.components, size=n, p=np.asarray(params.lambdas))
    votes = np.empty((n, m), dtype=np.int64)
    for i in range(params.components):
        rows = np.flatnonzero(picks == i)
        if rows.size:
            votes[rows] = _sample_mallows(rng, params.centers[i], params.phis[i], rows.size)
    return PreferenceProfile(votes)


@dataclass
class GeneratorSpec:
    """Named model plus parameters, as used by the command-line harness."""

    model: str = "ic"
    urn_ratio: float = DEFAULT_URN_RATIO
    phi: float = 0.5
    center: Optional[tuple] = None
    components: int = DEFAULT_COMPONENTS
    extra: dict = field(default_factory=dict)

    MODELS = ("ic", "urn", "mallows", "mixture")

    def __post_init__(self):
        if self.model not in self.MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {', '.join(self.MODELS)}")

    def generate(self, m: int, n: int, seed: int) -> PreferenceProfile:
        if self.model == "ic":
            return gen_impartial_culture(m, n, seed)
        if self.model == "urn":
            return gen_urn(m, n, seed, UrnParams(self.urn_ratio))
        if self.model == "mallows":
            return gen_mallows(m, n, self.center, self.phi, seed)
        return gen_mallows_mixture(m, n, seed, "random", self.components)

    def describe(self, m: int, n: int, seed: int) -> str:
        parts = [f"model={self.model}", f"m={m}", f"n={n}", f"seed={seed}", "rng=PCG64"]
        if self.model == "urn":
            parts.append(f"urn_ratio={self.urn_ratio}")
        elif self.model == "mallows":
            center = self.center or tuple(range(1, m + 1))
            parts += [f"phi={self.phi}", "center=" + "-".join(map(str, center))]
        elif self.model == "mixture":
            parts += [f"components={self.components}", "lambdas=normalized-uniform"]
        return " ".join(parts)
