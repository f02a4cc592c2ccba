"""Iteration-count predictors and convergence-rate fits."""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from .solvers import scg_schedule

__all__ = [
    "RateModel",
    "PredictorReport",
    "classic_iteration_bound",
    "lmo_lower_bound",
    "scg_iteration_bound",
    "predictor_report",
    "fit_rate",
    "f_gaps",
]


class RateModel(Enum):
    SUBLINEAR = "sublinear"
    LINEAR = "linear"


def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")


def _q(x) -> Fraction:
    # exact rational value of the float, so ceilings do not depend on rounding
    return Fraction(x)


def classic_iteration_bound(L: float, D: float, eps: float) -> int:
    """``ceil(2 L D^2 / eps)``: Frank-Wolfe iterations to reach ``eps`` in f."""
    _positive(L=L, D=D, eps=eps)
    return math.ceil(2 * _q(L) * _q(D) ** 2 / _q(eps))


def lmo_lower_bound(n: int, L: float, D: float, eps: float) -> int:
    """``ceil(min(n/2, L D^2 / (4 eps))) - 1``, floored at zero."""
    _positive(n=n, L=L, D=D, eps=eps)
    return max(math.ceil(min(Fraction(n, 2), _q(L) * _q(D) ** 2 / (4 * _q(eps)))) - 1, 0)


def scg_iteration_bound(L: float, mu: float, R0: float, eps: float) -> tuple[int, int]:
    """Shrinking-CG iteration counts ``(displayed, log_variant)``.

    ``displayed = ceil(8L/mu) * ceil(max(mu R0^2 / eps, 1))`` is the count as
    commonly printed; ``log_variant = ceil(8L/mu) * ceil(log2(max(mu R0^2/eps, 2)))``
    is what the solver's restart schedule actually runs.
    """
    _positive(L=L, mu=mu, R0=R0, eps=eps)
    if L < mu:
        raise ValueError("L must be >= mu")
    inner, restarts = scg_schedule(L, mu, R0, eps)
    ratio = _q(mu) * _q(R0) ** 2 / _q(eps)
    return inner * math.ceil(max(ratio, 1)), inner * restarts


@dataclass(frozen=True)
class PredictorReport:
    n: int
    L: float
    mu: float
    D: float
    R0: float
    eps: float
    classic_fw_iters: int
    lmo_lower_bound: int
    scg_total_inner_iters: int
    scg_total_inner_iters_displayed: int
    scg_restarts: int
    L_inf_upper: float

    def to_dict(self) -> dict:
        return asdict(self)


def predictor_report(n: int, L: float, mu: float, D: float, R0: float, eps: float) -> PredictorReport:
    """Evaluate every predictor at one set of inputs.

    ``L`` is the 2-norm constant; ``L_inf_upper = n * L`` bounds the
    infinity-norm Lipschitz constant of the gradient.
    """
    displayed, log_variant = scg_iteration_bound(L, mu, R0, eps)
    return PredictorReport(
        n=n, L=L, mu=mu, D=D, R0=R0, eps=eps,
        classic_fw_iters=classic_iteration_bound(L, D, eps),
        lmo_lower_bound=lmo_lower_bound(n, L, D, eps),
        scg_total_inner_iters=log_variant,
        scg_total_inner_iters_displayed=displayed,
        scg_restarts=scg_schedule(L, mu, R0, eps)[1],
        L_inf_upper=n * L,
    )


def f_gaps(trace, f_ref: float) -> np.ndarray:
    return np.array([r.f_value for r in trace]) - f_ref


def fit_rate(gaps, model: RateModel | str = RateModel.SUBLINEAR, k=None) -> float:
    """Least-squares rate of a positive error sequence.

    ``SUBLINEAR`` returns the slope of ``log(gap)`` against ``log(k)``;
    ``LINEAR`` returns ``exp`` of the slope of ``log(gap)`` against ``k``, i.e.
    the per-step contraction factor. ``k`` defaults to ``1, 2, ...``.
    Accepts a trace of :class:`IterRecord` only through :func:`f_gaps`.
    """
    model = RateModel(model)
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size < 10:
        raise ValueError("need at least 10 error values")
    if np.any(~(gaps > 0)):
        raise ValueError("errors must be positive")
    k = np.arange(1, gaps.size + 1, dtype=float) if k is None else np.asarray(k, dtype=float)
    y = np.log(gaps)
    if model is RateModel.SUBLINEAR:
        return float(np.polyfit(np.log(k), y, 1)[0])
    return float(np.exp(np.polyfit(k, y, 1)[0]))
