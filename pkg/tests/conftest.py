import itertools

import numpy as np
import pytest

from fullprop.core import PreferenceProfile, ScoringFunction, borda_psf
from fullprop.datagen import gen_impartial_culture, gen_mallows_mixture, gen_urn

ACCEPTANCE_LINES = []

GENERATORS = (gen_impartial_culture, gen_urn, gen_mallows_mixture)


def random_psf(rng, m):
    """Nonincreasing nonnegative integer vector ending in 0."""
    if m == 1:
        return ScoringFunction((0,))
    head = sorted(rng.integers(0, 7, size=m - 1).tolist(), reverse=True)
    return ScoringFunction(tuple(head) + (0,))


def random_instance(rng, seed, max_m=8, max_n=12, max_k=4, min_n=None, mixed_psf=False):
    m = int(rng.integers(2, max_m + 1))
    K = int(rng.integers(1, min(m, max_k) + 1))
    n = int(rng.integers(min_n if min_n is not None else K, max_n + 1))
    profile = GENERATORS[seed % 3](m, n, seed)
    psf = random_psf(rng, m) if mixed_psf and seed % 2 else borda_psf(m)
    return profile, psf, K


def enumerate_assignments(profile, psf, S, lower, upper, allow_null):
    """Independent oracle: best satisfaction over every function agents -> S (+ null)."""
    util = profile.utilities(psf)
    options = list(S) + ([0] if allow_null else [])
    best = -1
    for combo in itertools.product(options, repeat=profile.n):
        loads = [combo.count(a) for a in S]
        if any(x > upper for x in loads) or any(x < lower for x in loads):
            continue
        val = sum(int(util[i, a - 1]) for i, a in enumerate(combo) if a)
        best = max(best, val)
    return best


@pytest.fixture
def abc_profile():
    # agents 1,2: a>b>c ; agents 3,4: a>c>b  (a=1, b=2, c=3)
    return PreferenceProfile([[1, 2, 3], [1, 2, 3], [1, 3, 2], [1, 3, 2]])


@pytest.fixture
def criterion():
    def record(number, ok, detail, status=None):
        status = status or ("PASS" if ok else "FAIL")
        line = f"criterion {number:>2}: {status}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
