"""Conditional-gradient solvers with per-iteration traces.

All solvers work on ``f(x) = 0.5 * ||A x||^2`` (or its prox-regularization)
and keep the gradient up to date through the incremental recurrence, so one
iteration costs one product with ``A`` and one with ``A^T``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .domains import AxisBox, intersect_box_ball, box_diameter
from .objective import (
    ProxObjective,
    QuadraticForm,
    clamped_step,
    gradient_step_update,
    init_state,
    refresh,
)
from .sparse import OpCounter, as_vector, matvec

__all__ = [
    "StepRule",
    "StopCriterion",
    "Status",
    "IterRecord",
    "HullLedger",
    "Solution",
    "REFRESH_EVERY",
    "FEASIBILITY_TOL",
    "standard_step",
    "fw_gap",
    "frank_wolfe",
    "shrinking_cg",
    "scg_schedule",
    "ms_coefficient",
    "monteiro_condition",
    "monteiro_svaiter",
    "projected_gradient",
]

REFRESH_EVERY = 10_000
FEASIBILITY_TOL = 1e-10
HULL_MAX_DIM = 64


class StepRule(Enum):
    STANDARD = "standard"
    EXACT = "exact"


class Status(Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"
    CONDITION_UNREACHABLE = "ConditionUnreachable"


@dataclass(frozen=True)
class StopCriterion:
    eps_gap: float = 0.0
    max_iters: int | None = None
    max_lmo_calls: int | None = None

    def __post_init__(self):
        if self.eps_gap <= 0 and self.max_iters is None and self.max_lmo_calls is None:
            raise ValueError("stop criterion needs a positive eps_gap or a finite budget")


@dataclass(frozen=True)
class IterRecord:
    outer_index: int
    inner_index: int
    f_value: float
    fw_gap: float
    gamma: float
    radius: float
    matvec_count: int
    lmo_count: int
    elapsed_ns: int


class HullLedger:
    """Convex-combination weights of an iterate over ``x_0`` and the LMO outputs.

    Weights are stored as ``raw * scale`` so a step rescales in O(1).
    """

    def __init__(self, x0):
        self.atoms = [np.array(x0, dtype=float)]
        self._raw = [1.0]
        self._scale = 1.0
        self._index = {self.atoms[0].tobytes(): 0}

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self._raw) * self._scale

    def update(self, x, gamma: float) -> None:
        if gamma == 1.0:
            self._raw = [0.0] * len(self._raw)
            self._scale = 1.0
        else:
            self._scale *= 1.0 - gamma
            if self._scale < 1e-200:
                self._raw = list(self.weights)
                self._scale = 1.0
        key = np.asarray(x, dtype=float).tobytes()
        i = self._index.get(key)
        if i is None:
            self._index[key] = len(self.atoms)
            self.atoms.append(np.array(x, dtype=float))
            self._raw.append(gamma / self._scale)
        else:
            self._raw[i] += gamma / self._scale

    def point(self) -> np.ndarray:
        return self.weights @ np.vstack(self.atoms)


@dataclass
class Solution:
    x: np.ndarray
    f_value: float
    trace: list
    status: Status
    hull: HullLedger | None = None
    info: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.info.get("iterations", 0)


def standard_step(k: int) -> float:
    """Open-loop step ``2 / (k + 1)`` for ``k = 1, 2, ...``."""
    return 2.0 / (k + 1)


def _prox_terms(q):
    if isinstance(q, ProxObjective):
        return q.base, q.kappa, q.anchor
    return q, 0.0, None


def _full_gradient(state, kappa, anchor):
    if kappa:
        return state.g + kappa * (state.y - anchor)
    return state.g


def _objective_value(state, kappa, anchor):
    f = state.f_value
    if kappa:
        r = state.y - anchor
        f += 0.5 * kappa * float(r @ r)
    return f


def fw_gap(q, y, domain, counter: OpCounter | None = None) -> float:
    """Frank-Wolfe gap ``<grad F(y), y - LMO(grad F(y))>``; bounds ``F(y) - F*``."""
    y = as_vector(y, q.n, "y")
    g = q.gradient(y, counter)
    return float(g @ (y - domain.lmo(g)))


class _Clock:
    def __init__(self):
        self.t0 = time.perf_counter_ns()

    def __call__(self) -> int:
        return time.perf_counter_ns() - self.t0


def _feasible(domain, x, what="x0"):
    if not domain.contains(x, FEASIBILITY_TOL):
        raise ValueError(f"{what} is not feasible")


def frank_wolfe(q, domain, x0, rule: StepRule = StepRule.EXACT,
                stop: StopCriterion = StopCriterion(eps_gap=1e-6, max_iters=100_000),
                *, hull: bool | None = None, until=None, counter: OpCounter | None = None,
                callback=None) -> Solution:
    """Classical conditional gradient ``y_k = (1 - gamma_k) y_{k-1} + gamma_k x_k``.

    Parameters
    ----------
    q : QuadraticForm or ProxObjective
    domain : AxisBox or Simplex
    x0 : array_like
        Feasible starting point.
    rule : StepRule
        ``STANDARD`` uses ``2 / (k + 1)``; ``EXACT`` minimizes along the segment.
    stop : StopCriterion
    hull : bool, optional
        Track convex-combination weights; defaults to on for ``n <= 64``.
    until : callable, optional
        ``until(y, grad)`` is checked at every iterate (including ``x0``);
        returning True ends the run as converged.
    counter : OpCounter, optional
        Shared operation counter, for nesting inside outer methods.
    callback : callable, optional
        Called as ``callback(record, y)`` after every recorded iterate.
    """
    base, kappa, anchor = _prox_terms(q)
    x0 = as_vector(x0, q.n, "x0")
    _feasible(domain, x0)
    clock = _Clock()
    counter = counter if counter is not None else OpCounter()
    state = init_state(base, x0, counter)
    ledger = HullLedger(x0) if (hull if hull is not None else q.n <= HULL_MAX_DIM) else None
    trace = []
    lmo_count = 0
    max_iters = stop.max_iters if stop.max_iters is not None else math.inf
    max_lmo = stop.max_lmo_calls if stop.max_lmo_calls is not None else math.inf

    def emit(k, gamma, gap):
        rec = IterRecord(0, k, _objective_value(state, kappa, anchor), gap, gamma, 0.0,
                         counter.matvecs, lmo_count, clock())
        trace.append(rec)
        if callback is not None:
            callback(rec, state.y)

    grad = _full_gradient(state, kappa, anchor)
    x = domain.lmo(grad)
    lmo_count += 1
    gap = float(grad @ (state.y - x))
    emit(0, 0.0, gap)
    k = 0
    while True:
        if gap <= stop.eps_gap or (until is not None and until(state.y, grad)):
            status = Status.CONVERGED
            break
        if k >= max_iters or lmo_count >= max_lmo:
            status = Status.ITER_LIMIT
            break
        k += 1
        ax = matvec(base.A, x, counter)
        if rule is StepRule.STANDARD:
            gamma = standard_step(k)
        else:
            d = x - state.y
            gamma = clamped_step(state.w, ax - state.w, d, kappa,
                                 state.y - anchor if kappa else None)
        gradient_step_update(state, x, gamma, base, ax_new=ax)
        if state.steps_since_refresh >= REFRESH_EVERY:
            refresh(state, base)
        if ledger is not None:
            ledger.update(x, gamma)
        grad = _full_gradient(state, kappa, anchor)
        x = domain.lmo(grad)
        lmo_count += 1
        gap = float(grad @ (state.y - x))
        emit(k, gamma, gap)

    return Solution(state.y.copy(), _objective_value(state, kappa, anchor), trace, status,
                    ledger, {"iterations": k, "lmo_count": lmo_count,
                             "matvec_count": counter.matvecs, "final_gap": gap,
                             "gradient": grad.copy()})


def scg_schedule(L: float, mu: float, R0: float, eps: float) -> tuple[int, int]:
    """``(inner_iters, restarts)`` = ``(ceil(8L/mu), ceil(log2(max(mu R0^2 / eps, 2))))``."""
    ratio = Fraction(mu) * Fraction(R0) ** 2 / Fraction(eps)
    return math.ceil(8 * Fraction(L) / Fraction(mu)), math.ceil(math.log2(max(ratio, 2)))


def shrinking_cg(q: QuadraticForm, X: AxisBox, x0, L: float, mu: float, eps: float,
                 rule: StepRule = StepRule.EXACT, *, max_restarts: int | None = None,
                 max_iters: int | None = None, callback=None) -> Solution:
    """Shrinking conditional gradient on a box.

    Each restart ``t`` runs ``ceil(8L/mu)`` conditional-gradient steps over
    ``X ∩ B_R(p_{t-1})`` (infinity-norm ball), then sets ``p_t`` to the last
    iterate and shrinks ``R`` by ``sqrt(2)``. The run ends after the restart
    schedule (``ceil(log2(max(mu R0^2/eps, 2)))`` restarts unless
    ``max_restarts`` overrides it) or as soon as the Frank-Wolfe gap over the
    whole box drops to ``eps``. ``R0`` is the infinity-norm diameter of ``X``.
    ``max_iters`` caps the total number of inner steps.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    if L < mu:
        raise ValueError("L must be >= mu")
    if not eps > 0:
        raise ValueError("eps must be positive")
    x0 = as_vector(x0, q.n, "x0")
    _feasible(X, x0)
    clock = _Clock()
    counter = OpCounter()
    R0 = box_diameter(X)
    inner_iters, planned = scg_schedule(L, mu, R0, eps)
    n_restarts = planned if max_restarts is None else max_restarts
    state = init_state(q, x0, counter)
    trace = []
    lmo_count = 0
    restart_f, restart_gap, radii = [state.f_value], [], []

    def gap_over(box):
        nonlocal lmo_count
        lmo_count += 1
        x = box.lmo(state.g)
        return x, float(state.g @ (state.y - x))

    def emit(t, k, gamma, gap, R):
        rec = IterRecord(t, k, state.f_value, gap, gamma, R, counter.matvecs, lmo_count, clock())
        trace.append(rec)
        if callback is not None:
            callback(rec, state.y)

    _, gap_X = gap_over(X)
    restart_gap.append(gap_X)
    status = Status.CONVERGED if gap_X <= eps else Status.ITER_LIMIT
    R = R0
    t = 0
    total_inner = 0
    budget = math.inf if max_iters is None else max_iters
    while status is not Status.CONVERGED and t < n_restarts and total_inner < budget:
        t += 1
        if t > 1:
            refresh(state, q)
        p = state.y.copy()
        Xt = intersect_box_ball(X, p, R) if R > 0 else X
        radii.append(R)
        x, gap = gap_over(Xt)
        emit(t, 0, 0.0, gap, R)
        for k in range(1, inner_iters + 1):
            if total_inner >= budget:
                break
            total_inner += 1
            ax = matvec(q.A, x, counter)
            if rule is StepRule.STANDARD:
                gamma = standard_step(k)
            else:
                gamma = clamped_step(state.w, ax - state.w, x - state.y)
            gradient_step_update(state, x, gamma, q, ax_new=ax)
            x, gap = gap_over(Xt)
            emit(t, k, gamma, gap, R)
        restart_f.append(state.f_value)
        _, gap_X = gap_over(X)
        restart_gap.append(gap_X)
        if gap_X <= eps:
            status = Status.CONVERGED
        R /= math.sqrt(2.0)

    return Solution(state.y.copy(), state.f_value, trace, status, None, {
        "iterations": total_inner,
        "restarts": t,
        "planned_restarts": planned,
        "inner_iters": inner_iters,
        "restart_f": restart_f,
        "restart_gap": restart_gap,
        "radii": radii,
        "final_gap": gap_X,
        "lmo_count": lmo_count,
        "matvec_count": counter.matvecs,
    })


def ms_coefficient(kappa: float, A_prev: float) -> float:
    """Step weight ``a_{k+1}`` from ``kappa`` and the accumulated ``A_k``."""
    inv = 1.0 / kappa
    return 0.5 * (inv + math.sqrt(inv * inv + 4.0 * A_prev * inv))


def monteiro_condition(prox_grad, y, x, kappa: float) -> bool:
    """``||grad F(y)||_2 <= kappa/2 * ||y - x||_2``."""
    return bool(np.linalg.norm(prox_grad) <= 0.5 * kappa * np.linalg.norm(np.asarray(y) - x))


def _default_inner(prox, X, y_start, until, counter, max_iters, unreachable_gap):
    return frank_wolfe(prox, X, y_start, StepRule.EXACT,
                       StopCriterion(eps_gap=unreachable_gap, max_iters=max_iters),
                       hull=False, until=until, counter=counter)


def monteiro_svaiter(q: QuadraticForm, X: AxisBox, x0, kappa: float,
                     stop: StopCriterion = StopCriterion(eps_gap=1e-8, max_iters=200),
                     inner=None, *, inner_max_iters: int = 100_000,
                     callback=None) -> Solution:
    """Accelerated proximal-point outer loop with an inexact inner solver.

    ``inner(prox, X, y_start, until, counter, max_iters, unreachable_gap)``
    must return a :class:`Solution`; the default runs :func:`frank_wolfe` with
    exact line search and stops as soon as ``until`` (the acceptance
    inequality) holds. If the inner gap falls below ``1e-12 * kappa * D^2``
    first, the run stops with ``ConditionUnreachable``.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    x0 = as_vector(x0, q.n, "x0")
    _feasible(X, x0)
    inner = inner or _default_inner
    clock = _Clock()
    counter = OpCounter()
    unreachable_gap = 1e-12 * kappa * box_diameter(X) ** 2
    max_iters = stop.max_iters if stop.max_iters is not None else math.inf
    max_lmo = stop.max_lmo_calls if stop.max_lmo_calls is not None else math.inf

    y = x0.copy()
    z = x0.copy()
    A_k = 0.0
    lmo_count = 0
    trace = []
    accepted = []
    g = q.gradient(y, counter)
    x_lmo = X.lmo(g)
    lmo_count += 1
    gap = float(g @ (y - x_lmo))
    f_y = q.value(y, counter)
    trace.append(IterRecord(0, 0, f_y, gap, 0.0, 0.0, counter.matvecs, lmo_count, clock()))
    k = 0
    status = Status.ITER_LIMIT
    while True:
        if gap <= stop.eps_gap:
            status = Status.CONVERGED
            break
        if k >= max_iters or lmo_count >= max_lmo:
            status = Status.ITER_LIMIT
            break
        a = ms_coefficient(kappa, A_k)
        A_next = A_k + a
        x_center = (A_k / A_next) * y + (a / A_next) * z
        prox = ProxObjective(q, kappa, x_center)

        def until(yy, prox_grad, _x=x_center):
            return monteiro_condition(prox_grad, yy, _x, kappa)

        sol = inner(prox, X, X.project(x_center), until, counter, inner_max_iters,
                    unreachable_gap)
        lmo_count += sol.info.get("lmo_count", 0)
        y_new = sol.x
        prox_grad = sol.info.get("gradient")
        if prox_grad is None:
            prox_grad = prox.gradient(y_new, counter)
        if not monteiro_condition(prox_grad, y_new, x_center, kappa):
            status = (Status.CONDITION_UNREACHABLE if sol.status is Status.CONVERGED
                      else Status.ITER_LIMIT)
            break
        k += 1
        g = prox_grad - kappa * (y_new - x_center)
        z = z - a * g
        y = y_new
        A_k = A_next
        accepted.append({"a": a, "A": A_k, "grad_norm": float(np.linalg.norm(prox_grad)),
                         "rhs": 0.5 * kappa * float(np.linalg.norm(y - x_center)),
                         "inner_iters": sol.iterations})
        x_lmo = X.lmo(g)
        lmo_count += 1
        gap = float(g @ (y - x_lmo))
        rec = IterRecord(k, sol.iterations, sol.f_value - 0.5 * kappa * float(
            (y - x_center) @ (y - x_center)), gap, a, 0.0, counter.matvecs, lmo_count, clock())
        trace.append(rec)
        if callback is not None:
            callback(rec, y)

    return Solution(y.copy(), q.value(y), trace, status, None, {
        "iterations": k, "accepted": accepted, "A": A_k, "z": z, "final_gap": gap,
        "lmo_count": lmo_count, "matvec_count": counter.matvecs, "kappa": kappa,
    })


def projected_gradient(q: QuadraticForm, X: AxisBox, x0, L: float,
                       stop: StopCriterion = StopCriterion(eps_gap=1e-10, max_iters=100_000),
                       *, callback=None) -> Solution:
    """Projected gradient ``y+ = clip(y - grad f(y) / L)`` on a box.

    Stops when ``L * ||y+ - y||_2 <= eps_gap`` (gradient-mapping norm) or on
    budget. The ``fw_gap`` field of the trace is filled for comparison only;
    no LMO calls are charged.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    x0 = as_vector(x0, q.n, "x0")
    _feasible(X, x0)
    clock = _Clock()
    counter = OpCounter()
    state = init_state(q, x0, counter)
    max_iters = stop.max_iters if stop.max_iters is not None else math.inf
    trace = []

    def emit(k, step):
        rec = IterRecord(0, k, state.f_value, float(state.g @ (state.y - X.lmo(state.g))),
                         step, 0.0, counter.matvecs, 0, clock())
        trace.append(rec)
        if callback is not None:
            callback(rec, state.y)

    emit(0, 0.0)
    k = 0
    status = Status.ITER_LIMIT
    while k < max_iters:
        y_next = X.project(state.y - state.g / L)
        moved = L * float(np.linalg.norm(y_next - state.y))
        k += 1
        state.y = y_next
        refresh(state, q)
        emit(k, 1.0 / L)
        if moved <= stop.eps_gap:
            status = Status.CONVERGED
            break
    return Solution(state.y.copy(), state.f_value, trace, status, None,
                    {"iterations": k, "matvec_count": counter.matvecs, "lmo_count": 0})
