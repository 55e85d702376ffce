"""Approximation guarantees, the Lambert W function and sampling counts."""

from __future__ import annotations

import math
from fractions import Fraction

from .core import Rule


def lambert_w(x: float, tol: float = 1e-12, max_iter: int = 100) -> float:
    """Principal branch of Lambert's W on ``[0, inf)``: the ``w`` with ``w * e**w = x``.

    Halley iteration started from ``log(1 + x)``.
    """
    if x < 0 or math.isnan(x):
        raise ValueError("lambert_w is only defined here for x >= 0")
    if x == 0:
        return 0.0
    w = math.log1p(x)
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol * max(1.0, x):
            break
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= tol * (1.0 + abs(w)):
            break
    return w


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def coverage_threshold(m: int, K: int) -> int:
    """Top-x cutoff used by the position-restriction algorithm: ``ceil(m W(K) / K)``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return math.ceil(m * lambert_w(K) / K)


def sample_count(lam: float, epsilon: float, K: int) -> int:
    """Random committees needed to hit the sampling guarantee with probability ``lam``.

    ``ceil(512 * log2(1/(1-lam)) / (K * epsilon**2))``, never below 1.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if K < 1:
        raise ValueError("K must be >= 1")
    return max(1, math.ceil(512 * math.log2(1 / (1 - lam)) / (K * epsilon**2)))


def _greedy_borda_bound(m: int, K: int) -> float:
    return 1 - (K - 1) / (2 * (m - 1)) - float(harmonic(K)) / K


def theoretical_bound(algorithm: str, rule, m: int, K: int, borda: bool = True) -> float:
    """Known worst-case fraction of the ideal satisfaction ``n * alpha[1]``.

    For ``gm`` the guarantee is relative to the optimum instead (``1 - 1/e``)
    unless the rule is Monroe under Borda. Negative formulas are vacuous and
    are reported as 0.
    """
    rule = Rule.parse(rule)
    alg = algorithm.lower()
    if not 1 <= K <= m:
        raise ValueError(f"K={K} out of range 1..{m}")
    if m < 2:
        raise ValueError("bounds need m >= 2")
    if rule is Rule.MONROE and alg in ("a", "b", "c"):
        value = _greedy_borda_bound(m, K)
    elif alg == "gm":
        if rule is Rule.MONROE and borda:
            value = _greedy_borda_bound(m, K)
        else:
            value = 1 - 1 / math.e
    elif rule is Rule.MONROE and alg == "r":
        value = 0.5 * (1 + K / m - (K * K * m - K**3) / (m**3 - m * m))
    elif rule is Rule.CC and alg == "p":
        value = 1 - 2 * lambert_w(K) / K
    elif rule is Rule.CC and alg == "r":
        value = (1 - 1 / (K + 1)) * (1 + 1 / m)
    elif rule is Rule.CC and alg == "c":
        value = 1 - 1 / math.e
    else:
        raise ValueError(f"no known bound for algorithm {algorithm!r} under {rule.value}")
    return min(1.0, max(0.0, value))
