import itertools
from fractions import Fraction

import numpy as np
import pytest

from shrinkcg.sparse import csr_from_triplets


def random_sparse(n_rows, n_cols, s, rng):
    """Random matrix with at most ``s`` nonzeros per row and per column."""
    entries = []
    for _ in range(s):
        perm = rng.permutation(max(n_rows, n_cols))
        for i in range(n_rows):
            j = perm[i]
            if j < n_cols:
                entries.append((i, int(j), float(rng.standard_normal())))
    # duplicates are summed, so the cap can only shrink
    return csr_from_triplets(entries, n_rows, n_cols)


def random_spd_sparse(n, s, rng, shift=1.0):
    """``shift * I + S`` with small off-diagonal part (nonsingular)."""
    entries = [(i, i, shift) for i in range(n)]
    if s > 1:
        for _ in range(s - 1):
            perm = rng.permutation(n)
            for i in range(n):
                if perm[i] != i:
                    entries.append((i, int(perm[i]), 0.4 * shift / (s - 1) * rng.uniform(-1, 1)))
    return csr_from_triplets(entries, n, n)


def _exact_products(p, v):
    # a product of two doubles is a dyadic rational; scale to one denominator
    fr = [Fraction(float(a)) * Fraction(float(b)) for a, b in zip(p, v)]
    den = max(f.denominator for f in fr)
    return np.array([f.numerator * (den // f.denominator) for f in fr], dtype=object), den


_BITS = {}


def lmo_is_exact_vertex_min(box, p, x):
    """True when <p, x> equals the minimum of <p, v> over all box vertices, in exact arithmetic."""
    n = len(p)
    if n not in _BITS:
        _BITS[n] = np.array(list(itertools.product([0, 1], repeat=n)), dtype=object)
    lo, d_lo = _exact_products(p, box.lo)
    hi, d_hi = _exact_products(p, box.hi)
    got, d_x = _exact_products(p, x)
    den = max(d_lo, d_hi, d_x)
    lo, hi = lo * (den // d_lo), hi * (den // d_hi)
    best = min((_BITS[n] * (hi - lo)).sum(axis=1)) + lo.sum()
    return got.sum() * (den // d_x) == best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion; printed at session end."""

    def record(number, ok, detail, info=False):
        tag = "INFO" if info else ("PASS" if ok else "FAIL")
        line = f"[{tag}] criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
