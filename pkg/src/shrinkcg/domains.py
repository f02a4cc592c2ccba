"""Feasible sets and their linear minimization oracles.

Axis-aligned boxes cover the cube ``||x||_inf <= 1``, every ball
``B_R^inf(c)`` and every intersection of the two, which is what keeps the
ball-restricted oracle as cheap as the plain one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import as_vector

__all__ = [
    "DEFAULT_TOL",
    "EmptyIntersectionError",
    "AxisBox",
    "Simplex",
    "AffineMap",
    "lmo_box",
    "lmo_simplex",
    "intersect_box_ball",
    "normalize_transform",
    "box_diameter",
    "contains",
]

DEFAULT_TOL = 1e-12


class EmptyIntersectionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AxisBox:
    """Box ``{x : lo <= x <= hi}``; ``lo == hi`` on an axis is allowed."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo, name="lo").copy()
        hi = as_vector(self.hi, lo.shape[0], "hi").copy()
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi on every axis")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, n: int, radius: float = 1.0, center=None) -> "AxisBox":
        c = np.zeros(n) if center is None else as_vector(center, n, "center")
        return cls(c - radius, c + radius)

    @classmethod
    def from_center(cls, center, half_width) -> "AxisBox":
        center = as_vector(center, name="center")
        return cls(center - half_width, center + half_width)

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo)

    def lmo(self, p) -> np.ndarray:
        return lmo_box(self, p)

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return contains(self, x, tol)

    def project(self, x) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)

    def diameter(self) -> float:
        return box_diameter(self)

    def diameter2(self) -> float:
        """Euclidean diameter ``||hi - lo||_2``."""
        return float(np.linalg.norm(self.hi - self.lo))


@dataclass(frozen=True)
class Simplex:
    """Standard unit simplex ``{x >= 0, sum(x) = 1}``."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("simplex dimension must be >= 1")

    def lmo(self, p) -> np.ndarray:
        return lmo_simplex(as_vector(p, self.n, "p"))

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol * max(1, self.n))

    def diameter(self) -> float:
        return 1.0 if self.n > 1 else 0.0

    def diameter2(self) -> float:
        return float(np.sqrt(2.0)) if self.n > 1 else 0.0


def lmo_box(box: AxisBox, p) -> np.ndarray:
    """Vertex of ``box`` minimizing ``<p, x>``; zero components pick the midpoint."""
    p = as_vector(p, box.n, "p")
    return np.where(p > 0, box.lo, np.where(p < 0, box.hi, 0.5 * (box.lo + box.hi)))


def lmo_simplex(p) -> np.ndarray:
    """Simplex vertex ``e_i`` with ``i = argmin p`` (lowest index on ties)."""
    p = as_vector(p, name="p")
    if p.shape[0] < 1:
        raise ValueError("empty simplex")
    x = np.zeros_like(p)
    x[int(np.argmin(p))] = 1.0
    return x


def intersect_box_ball(X: AxisBox, center, R: float) -> AxisBox:
    """``{x in X : ||x - center||_inf <= R}`` as a box."""
    if not R > 0:
        raise ValueError("radius must be positive")
    center = as_vector(center, X.n, "center")
    lo = np.maximum(X.lo, center - R)
    hi = np.minimum(X.hi, center + R)
    bad = lo > hi
    if np.any(bad):
        raise EmptyIntersectionError(
            f"ball does not meet the box on axis {int(np.flatnonzero(bad)[0])}")
    return AxisBox(lo, hi)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Per-axis map ``x -> scale * (x - offset)`` with positive ``scale``."""

    scale: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        scale = as_vector(self.scale, name="scale")
        offset = as_vector(self.offset, scale.shape[0], "offset")
        if np.any(scale <= 0):
            raise ValueError("scale must be positive")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "offset", offset)

    def __call__(self, x) -> np.ndarray:
        return self.scale * (np.asarray(x, dtype=float) - self.offset)

    def inverse(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) / self.scale + self.offset

    def map_box(self, box: AxisBox) -> AxisBox:
        return AxisBox(self(box.lo), self(box.hi))

    def pullback_linear(self, p) -> np.ndarray:
        """Coefficients ``q`` with ``<q, T(x)> = <p, x> + const``."""
        return np.asarray(p, dtype=float) / self.scale


def normalize_transform(box: AxisBox) -> tuple[AffineMap, AxisBox]:
    """Shift the box center to the origin and rescale each axis onto ``[-1, 1]``."""
    width = box.hi - box.lo
    if np.any(width <= 0):
        raise ValueError("cannot normalize a box with a degenerate axis")
    T = AffineMap(2.0 / width, 0.5 * (box.lo + box.hi))
    return T, AxisBox.cube(box.n)


def box_diameter(box: AxisBox) -> float:
    """Diameter in the infinity norm, ``max_i (hi_i - lo_i)``."""
    return float(np.max(box.hi - box.lo)) if box.n else 0.0


def contains(box: AxisBox, x, tol: float = DEFAULT_TOL) -> bool:
    x = as_vector(x, box.n)
    return bool(np.all(x >= box.lo - tol) and np.all(x <= box.hi + tol))
