"""Random doubly-sparse strongly convex instances.

``A = mu * I + S`` where ``S`` is a sum of ``s - 1`` scaled permutation
matrices (collisions with the diagonal or each other are dropped). Every row
and column of ``S`` has absolute sum at most ``offdiag_mass * mu``, hence
``||S||_2 <= offdiag_mass * mu`` and the singular values of ``A`` lie in
``[(1 - offdiag_mass) mu, (1 + offdiag_mass) mu]``.

Randomness comes from numpy's PCG64 bit generator (PCG-XSL-RR 128/64), which
produces the same stream on every platform for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .domains import AxisBox
from .sparse import CsrMatrix, csr_from_triplets

__all__ = ["ProblemSpec", "make_rng", "generate_problem", "random_point"]


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    s: int = 4
    mu_target: float = 1.0
    seed: int = 0
    offdiag_mass: float = 0.5
    box_lo: tuple | float | None = None
    box_hi: tuple | float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.s <= self.n:
            raise ValueError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")
        if not self.mu_target > 0:
            raise ValueError("mu_target must be positive")
        if not 0 <= self.offdiag_mass <= 0.5:
            raise ValueError("offdiag_mass must lie in [0, 0.5]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("box_lo", "box_hi"):
            if isinstance(d[key], (list, tuple)):
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        d = dict(d)
        for key in ("box_lo", "box_hi"):
            if isinstance(d.get(key), list):
                d[key] = tuple(d[key])
        return cls(**d)

    def domain(self) -> AxisBox:
        lo = -1.0 if self.box_lo is None else self.box_lo
        hi = 1.0 if self.box_hi is None else self.box_hi
        return AxisBox(np.broadcast_to(np.asarray(lo, float), (self.n,)),
                       np.broadcast_to(np.asarray(hi, float), (self.n,)))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_problem(spec: ProblemSpec) -> tuple[CsrMatrix, AxisBox]:
    rng = make_rng(spec.seed)
    n, s, mu = spec.n, spec.s, spec.mu_target
    entries = [(i, i, mu) for i in range(n)]
    extra = s - 1
    if extra > 0 and spec.offdiag_mass > 0:
        used = set((i, i) for i in range(n))
        cap = spec.offdiag_mass * mu / extra
        for _ in range(extra):
            perm = rng.permutation(n)
            mags = cap * rng.uniform(0.5, 1.0, size=n)
            signs = rng.choice(np.array([-1.0, 1.0]), size=n)
            for i in range(n):
                j = int(perm[i])
                if (i, j) in used:
                    continue
                used.add((i, j))
                entries.append((i, j, float(signs[i] * mags[i])))
    return csr_from_triplets(entries, n, n), spec.domain()


def random_point(box: AxisBox, seed: int) -> np.ndarray:
    """Uniform point of ``box`` from a seeded stream (distinct from the matrix stream)."""
    rng = make_rng(seed ^ 0x9E3779B97F4A7C15)
    return box.lo + rng.uniform(0.0, 1.0, size=box.n) * (box.hi - box.lo)
