"""Quadratic objective ``f(x) = 0.5 * ||A x||^2`` and its prox-regularization.

The gradient ``A^T A y`` of a conditional-gradient iterate can be maintained
incrementally: when ``y <- (1 - gamma) y + gamma x``, both ``A y`` and
``A^T A y`` follow the same convex combination, so a step costs one product
with ``A`` and one with ``A^T`` applied to the new point only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sparse import CsrMatrix, OpCounter, as_vector, matvec, matvec_transpose

__all__ = [
    "QuadraticForm",
    "ProxObjective",
    "GradientState",
    "SpectralEstimationError",
    "value",
    "gradient",
    "init_state",
    "gradient_step_update",
    "refresh",
    "exact_linesearch",
    "clamped_step",
    "estimate_spectral",
]


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    A: CsrMatrix

    @property
    def n(self) -> int:
        return self.A.n_cols

    @property
    def kappa(self) -> float:
        return 0.0

    @property
    def base(self) -> "QuadraticForm":
        return self

    def value(self, x, counter=None) -> float:
        return value(self, x, counter)

    def gradient(self, x, counter=None) -> np.ndarray:
        return gradient(self, x, counter)


@dataclass(frozen=True, eq=False)
class ProxObjective:
    """``F(y) = f(y) + kappa/2 * ||y - anchor||^2`` for a quadratic ``f``."""

    base: QuadraticForm
    kappa: float
    anchor: np.ndarray

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        anchor = as_vector(self.anchor, self.base.n, "anchor").copy()
        anchor.setflags(write=False)
        object.__setattr__(self, "anchor", anchor)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def A(self) -> CsrMatrix:
        return self.base.A

    def value(self, y, counter=None) -> float:
        y = as_vector(y, self.n, "y")
        r = y - self.anchor
        return value(self.base, y, counter) + 0.5 * self.kappa * float(r @ r)

    def gradient(self, y, counter=None) -> np.ndarray:
        y = as_vector(y, self.n, "y")
        return gradient(self.base, y, counter) + self.kappa * (y - self.anchor)


def value(q: QuadraticForm, x, counter: OpCounter | None = None) -> float:
    """``0.5 * ||A x||^2`` (one sparse product)."""
    x = as_vector(x, q.n)
    ax = matvec(q.A, x, counter)
    return 0.5 * float(ax @ ax)


def gradient(q: QuadraticForm, x, counter: OpCounter | None = None) -> np.ndarray:
    """``A^T A x`` via two sparse products."""
    x = as_vector(x, q.n)
    return matvec_transpose(q.A, matvec(q.A, x, counter), counter)


@dataclass
class GradientState:
    """Iterate ``y`` with cached ``w = A y`` and gradient ``g = A^T w``.

    Mutable and owned by a single solver run.
    """

    y: np.ndarray
    w: np.ndarray
    g: np.ndarray
    counter: OpCounter = field(default_factory=OpCounter)
    steps_since_refresh: int = 0

    @property
    def matvec_count(self) -> int:
        return self.counter.matvecs

    @property
    def f_value(self) -> float:
        return 0.5 * float(self.w @ self.w)

    def copy(self) -> "GradientState":
        return GradientState(self.y.copy(), self.w.copy(), self.g.copy(),
                             self.counter, self.steps_since_refresh)


def init_state(q: QuadraticForm, y, counter: OpCounter | None = None) -> GradientState:
    counter = counter if counter is not None else OpCounter()
    y = as_vector(y, q.n, "y").copy()
    w = matvec(q.A, y, counter)
    return GradientState(y, w, matvec_transpose(q.A, w, counter), counter)


def gradient_step_update(state: GradientState, x_new, gamma: float, q: QuadraticForm,
                         ax_new: np.ndarray | None = None) -> GradientState:
    """Move to ``(1 - gamma) y + gamma x_new`` and update ``w`` and ``g`` in place.

    ``ax_new`` may carry a precomputed ``A @ x_new`` (e.g. from a line search),
    in which case only the ``A^T`` product is charged here.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    x_new = np.asarray(x_new, dtype=np.float64)
    if ax_new is None:
        ax_new = matvec(q.A, x_new, state.counter)
    atax = matvec_transpose(q.A, ax_new, state.counter)
    if gamma == 1.0:
        state.y = x_new.copy()
        state.w = np.array(ax_new, dtype=np.float64)
        state.g = atax
    elif gamma != 0.0:
        keep = 1.0 - gamma
        state.y = keep * state.y + gamma * x_new
        state.w = keep * state.w + gamma * ax_new
        state.g = keep * state.g + gamma * atax
    state.steps_since_refresh += 1
    return state


def refresh(state: GradientState, q: QuadraticForm) -> GradientState:
    """Recompute ``w`` and ``g`` from ``y`` to discard recurrence roundoff."""
    state.w = matvec(q.A, state.y, state.counter)
    state.g = matvec_transpose(q.A, state.w, state.counter)
    state.steps_since_refresh = 0
    return state


def clamped_step(w, ad, d, kappa: float = 0.0, offset=None) -> float:
    """Minimizer over [0, 1] of the quadratic along ``d``.

    ``w`` is ``A y``, ``ad`` is ``A d``. For a prox term pass ``kappa`` and
    ``offset = y - anchor``.
    """
    num = float(w @ ad)
    den = float(ad @ ad)
    if kappa:
        num += kappa * float(offset @ d)
        den += kappa * float(d @ d)
    if den <= 0.0:
        return 0.0
    return min(1.0, max(0.0, -num / den))


def exact_linesearch(q, y, x, counter: OpCounter | None = None) -> float:
    """Exact step ``argmin_{gamma in [0,1]} F((1 - gamma) y + gamma x)``."""
    y = as_vector(y, q.n, "y")
    d = as_vector(x, q.n, "x") - y
    A = q.A
    w = matvec(A, y, counter)
    ad = matvec(A, d, counter)
    kappa = q.kappa
    offset = y - q.anchor if kappa else None
    return clamped_step(w, ad, d, kappa, offset)


class SpectralEstimationError(RuntimeError):
    """Power iteration stalled; ``L`` and ``mu`` hold the best estimates so far."""

    def __init__(self, message, L, mu):
        super().__init__(message)
        self.L = L
        self.mu = mu


def _power(apply, n, tol, max_iter, rng):
    # stops on the residual ||M v - lam v|| <= tol * |lam|, which bounds the
    # distance from lam to the spectrum of the symmetric operator M
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = apply(v)
        lam = float(v @ u)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0, True
        if np.linalg.norm(u - lam * v) <= tol * abs(lam):
            return lam, True
        v = u / nu
    return lam, False


def estimate_spectral(q: QuadraticForm, tol: float = 1e-8, max_iter: int = 100_000,
                      counter: OpCounter | None = None, seed: int = 0):
    """Extreme eigenvalues of ``A^T A`` by power iteration.

    Returns ``(L, mu)``. ``L`` is inflated by ``(1 + tol)`` so it upper-bounds
    the Rayleigh estimate; ``mu`` comes from power iteration on
    ``L I - A^T A`` and is clamped at zero.
    """
    A = q.A
    if A.n_rows != A.n_cols:
        raise ValueError("spectral estimate needs a square matrix")
    n = q.n
    rng = np.random.Generator(np.random.PCG64(seed))

    def ata(v):
        return matvec_transpose(A, matvec(A, v, counter), counter)

    lam_max, ok = _power(ata, n, tol, max_iter, rng)
    L = lam_max * (1.0 + tol)
    if not ok:
        raise SpectralEstimationError("power iteration for L did not converge", L, None)
    shift, ok = _power(lambda v: L * v - ata(v), n, tol, max_iter, rng)
    mu = max(L - shift, 0.0)
    if not ok:
        raise SpectralEstimationError("power iteration for mu did not converge", L, mu)
    return L, mu
