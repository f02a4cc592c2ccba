import math
from fractions import Fraction

import numpy as np
import pytest

from shrinkcg.domains import AxisBox, Simplex, contains
from shrinkcg.objective import QuadraticForm, estimate_spectral, gradient
from shrinkcg.problems import ProblemSpec, generate_problem, random_point
from shrinkcg.solvers import (
    FEASIBILITY_TOL,
    HullLedger,
    Status,
    StepRule,
    StopCriterion,
    frank_wolfe,
    fw_gap,
    monteiro_condition,
    monteiro_svaiter,
    ms_coefficient,
    projected_gradient,
    scg_schedule,
    shrinking_cg,
    standard_step,
)
from shrinkcg.sparse import csr_from_dense, csr_from_triplets

from conftest import random_sparse

ONE = QuadraticForm(csr_from_triplets([(0, 0, 1.0)], 1, 1))
UNIT = AxisBox.cube(1)


def instance(n=16, s=3, seed=0):
    A, X = generate_problem(ProblemSpec(n=n, s=s, seed=seed))
    q = QuadraticForm(A)
    L, mu = estimate_spectral(q)
    return q, X, L, mu, random_point(X, seed)


def reference_f(q, X, L, x0):
    return projected_gradient(q, X, x0, L, StopCriterion(1e-13, 500_000)).f_value


# frank_wolfe

def test_fw_exact_one_dimensional():
    sol = frank_wolfe(ONE, UNIT, [1.0], StepRule.EXACT)
    assert sol.trace[1].gamma == 0.5
    assert sol.x[0] == 0.0
    assert sol.iterations == 1
    assert sol.status is Status.CONVERGED


def standard_oracle(steps):
    """Exact rational iterates of the open-loop rule on 0.5 x^2 over [-1, 1]."""
    y, ys = Fraction(1), []
    for k in range(1, steps + 1):
        x = -1 if y > 0 else (1 if y < 0 else 0)
        g = Fraction(2, k + 1)
        y = (1 - g) * y + g * x
        ys.append(y)
    return ys


def test_fw_standard_one_dimensional():
    sol = frank_wolfe(ONE, UNIT, [1.0], StepRule.STANDARD, StopCriterion(max_iters=40))
    ys = standard_oracle(40)
    assert ys[0] == -1 and ys[1] == Fraction(1, 3)
    got = [r.f_value for r in sol.trace[1:]]
    want = [float(y * y / 2) for y in ys]
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-15)
    # the open-loop rule repeats each value once (y_{2m} = -y_{2m-1})
    assert all(b <= a * (1 + 1e-12) for a, b in zip(got, got[1:]))
    assert sol.status is Status.ITER_LIMIT


def test_fw_already_optimal():
    sol = frank_wolfe(ONE, UNIT, [0.0])
    assert sol.iterations == 0
    assert sol.trace[0].fw_gap == 0.0
    assert sol.status is Status.CONVERGED


def test_fw_rejects_infeasible_start():
    with pytest.raises(ValueError):
        frank_wolfe(ONE, UNIT, [1.5])


def test_fw_on_simplex():
    q = QuadraticForm(csr_from_dense(np.eye(3)))
    sol = frank_wolfe(q, Simplex(3), [1.0, 0.0, 0.0], stop=StopCriterion(1e-9, 10_000))
    np.testing.assert_allclose(sol.x, np.full(3, 1 / 3), atol=1e-6)
    assert Simplex(3).contains(sol.x)


def test_fw_budget_lmo_calls():
    q, X, *_, x0 = instance()
    sol = frank_wolfe(q, X, x0, stop=StopCriterion(0.0, max_lmo_calls=5))
    assert sol.status is Status.ITER_LIMIT
    assert sol.trace[-1].lmo_count == 5


def test_stop_criterion_needs_bound():
    with pytest.raises(ValueError):
        StopCriterion()


def test_standard_step():
    assert standard_step(1) == 1.0
    assert standard_step(3) == 0.5


@pytest.mark.parametrize("rule", list(StepRule))
def test_fw_trace_invariants(rule):
    q, X, *_, x0 = instance(n=24, seed=3)
    seen = []
    sol = frank_wolfe(q, X, x0, rule, StopCriterion(1e-6, 3000),
                      callback=lambda rec, y: seen.append(contains(X, y, FEASIBILITY_TOL)))
    assert all(seen)
    mv = [r.matvec_count for r in sol.trace]
    lmo = [r.lmo_count for r in sol.trace]
    assert mv == sorted(mv) and lmo == sorted(lmo)
    assert all(math.isfinite(r.f_value) for r in sol.trace)
    # the gradient cache is accurate at the end
    np.testing.assert_allclose(sol.info["gradient"], gradient(q, sol.x), rtol=1e-9, atol=1e-12)


def test_exact_rule_is_monotone():
    q, X, *_, x0 = instance(n=32, seed=5)
    f = [r.f_value for r in frank_wolfe(q, X, x0, StepRule.EXACT, StopCriterion(1e-8, 5000)).trace]
    assert all(b <= a + 1e-15 * max(a, 1.0) for a, b in zip(f, f[1:]))


def test_hull_reconstructs_iterate():
    q, X, *_, x0 = instance(n=20, seed=2)
    for rule in StepRule:
        sol = frank_wolfe(q, X, x0, rule, StopCriterion(1e-6, 2000))
        w = sol.hull.weights
        assert np.all(w >= 0)
        assert abs(w.sum() - 1.0) <= 1e-9
        np.testing.assert_allclose(sol.hull.point(), sol.x, atol=1e-9)


def test_hull_disabled_above_threshold():
    q, X, *_, x0 = instance(n=80, seed=1)
    assert frank_wolfe(q, X, x0, stop=StopCriterion(max_iters=3)).hull is None


def test_hull_ledger_rescales_safely():
    h = HullLedger(np.zeros(2))
    rng = np.random.default_rng(0)
    for k in range(1, 3000):
        h.update(np.sign(rng.standard_normal(2)), 0.5)
    assert abs(h.weights.sum() - 1.0) <= 1e-9


# fw_gap

def test_fw_gap_examples():
    assert fw_gap(ONE, [1.0], UNIT) == 2.0
    assert fw_gap(ONE, [0.0], UNIT) == 0.0


def test_fw_gap_certificate_grid(rng):
    for _ in range(10):
        q = QuadraticForm(random_sparse(2, 2, 2, rng))
        X = AxisBox([-1.0, -0.5], [0.8, 1.0])
        grid = np.linspace(0, 1, 401)
        pts = np.array([[X.lo[0] + a * (X.hi[0] - X.lo[0]), X.lo[1] + b * (X.hi[1] - X.lo[1])]
                        for a in grid for b in grid])
        M = q.A.to_dense()
        f_star = float(np.min(0.5 * np.sum((pts @ M.T) ** 2, axis=1)))
        for y in pts[rng.integers(0, len(pts), 20)]:
            # grid minimum overestimates f*, so slack covers the grid resolution
            assert q.value(y) - f_star <= fw_gap(q, y, X) + 1e-4


def test_fw_gap_bounds_suboptimality():
    q, X, L, mu, x0 = instance(n=12, seed=4)
    f_star = reference_f(q, X, L, x0)
    sol = frank_wolfe(q, X, x0, StepRule.STANDARD, StopCriterion(max_iters=300))
    for r in sol.trace:
        assert r.f_value - f_star <= r.fw_gap + 1e-12


# shrinking_cg

def test_scg_one_dimensional():
    sol = shrinking_cg(ONE, UNIT, [1.0], 1.0, 1.0, 1e-6)
    assert sol.x[0] == 0.0
    assert sol.info["restarts"] == 1
    assert sol.status is Status.CONVERGED


def test_scg_radius_ledger():
    q, X, L, mu, x0 = instance(n=16, seed=0)
    sol = shrinking_cg(q, X, x0, L, mu, 1e-6, StepRule.STANDARD, max_restarts=4)
    radii = sol.info["radii"]
    assert radii[0] == 2.0
    assert radii[2] == pytest.approx(1.0, rel=1e-15)
    for a, b in zip(radii, radii[1:]):
        assert b == a / math.sqrt(2.0)
    # records carry the radius of their restart
    for r in sol.trace:
        assert r.radius == radii[r.outer_index - 1]


def test_scg_feasibility_per_restart():
    q, X, L, mu, x0 = instance(n=16, seed=6)
    bad = []

    def check(rec, y):
        if not contains(X, y, FEASIBILITY_TOL):
            bad.append(rec)
    sol = shrinking_cg(q, X, x0, L, mu, 1e-8, callback=check)
    assert not bad
    assert sol.status is Status.CONVERGED


@pytest.mark.parametrize("seed", range(5))
def test_scg_per_restart_error(seed):
    q, X, L, mu, x0 = instance(n=32, seed=seed)
    f_star = reference_f(q, X, L, x0)
    sol = shrinking_cg(q, X, x0, L, mu, 1e-9)
    R0 = 2.0
    for t, f in enumerate(sol.info["restart_f"]):
        assert f - f_star <= 4.0 * mu * (R0 / math.sqrt(2.0) ** t) ** 2


def test_scg_schedule():
    assert scg_schedule(1.0, 1.0, 2.0, 1.0) == (8, 2)
    assert scg_schedule(4.0, 1.0, 2.0, 8.0) == (32, 1)


def test_scg_errors():
    with pytest.raises(ValueError):
        shrinking_cg(ONE, UNIT, [0.5], 1.0, 0.0, 1e-3)
    with pytest.raises(ValueError):
        shrinking_cg(ONE, UNIT, [2.0], 1.0, 1.0, 1e-3)
    with pytest.raises(ValueError):
        shrinking_cg(ONE, UNIT, [0.5], 1.0, 1.0, 0.0)


def test_scg_max_iters():
    q, X, L, mu, x0 = instance(n=16, seed=0)
    sol = shrinking_cg(q, X, x0, L, mu, 1e-12, max_iters=10)
    assert sol.info["iterations"] == 10
    assert sol.status is Status.ITER_LIMIT


# monteiro_svaiter

def test_ms_coefficients():
    a1 = ms_coefficient(1.0, 0.0)
    assert a1 == 1.0
    assert ms_coefficient(1.0, a1) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)


def test_ms_condition_literal():
    assert monteiro_condition(np.array([0.5]), np.array([1.0]), np.array([0.0]), 1.0)
    assert not monteiro_condition(np.array([0.6]), np.array([1.0]), np.array([0.0]), 1.0)


def interior_instance():
    diag = np.sqrt(np.logspace(0, -3, 20))
    q = QuadraticForm(csr_from_dense(np.diag(diag)))
    X = AxisBox.cube(20, 10.0)
    x0 = np.random.Generator(np.random.PCG64(1)).uniform(-1, 1, 20)
    return q, X, x0


def test_ms_condition_holds_when_accepted():
    q, X, x0 = interior_instance()
    sol = monteiro_svaiter(q, X, x0, 1.0, StopCriterion(max_iters=20))
    acc = sol.info["accepted"]
    assert len(acc) == 20
    assert all(a["grad_norm"] <= a["rhs"] for a in acc)
    assert acc[0]["a"] == 1.0 and acc[0]["A"] == 1.0
    f = [r.f_value for r in sol.trace]
    assert f[-1] < f[0]


def test_ms_condition_unreachable_on_boundary():
    # the prox minimizer (2/3, 2/3) is clipped to the corner (1, 1), where
    # ||grad F|| = 0.5 sqrt(2) exceeds kappa/2 ||y - x|| = 0.25 sqrt(2)
    q = QuadraticForm(csr_from_dense(np.eye(2)))
    X = AxisBox([1.0, 1.0], [2.0, 2.0])
    sol = monteiro_svaiter(q, X, [2.0, 2.0], 0.5, StopCriterion(1e-14, 50))
    assert sol.status is Status.CONDITION_UNREACHABLE


def test_ms_rejects_bad_kappa():
    with pytest.raises(ValueError):
        monteiro_svaiter(ONE, UNIT, [0.5], 0.0)


def test_ms_custom_inner():
    calls = []

    def inner(prox, X, y0, until, counter, max_iters, unreachable):
        calls.append(y0.copy())
        return frank_wolfe(prox, X, y0, StepRule.EXACT,
                           StopCriterion(unreachable, max_iters), until=until, counter=counter)
    q, X, x0 = interior_instance()
    monteiro_svaiter(q, X, x0, 1.0, StopCriterion(max_iters=3), inner)
    assert len(calls) == 3


# projected_gradient

def test_pg_one_dimensional():
    sol = projected_gradient(ONE, UNIT, [1.0], 1.0, StopCriterion(1e-12, 10))
    assert sol.trace[1].f_value == 0.0
    np.testing.assert_array_equal(sol.x, [0.0])


def test_pg_fixed_point():
    q = QuadraticForm(csr_from_dense(np.eye(2)))
    X = AxisBox([1.0, -1.0], [2.0, 1.0])
    sol = projected_gradient(q, X, [1.0, 0.0], 1.0, StopCriterion(1e-12, 10))
    np.testing.assert_array_equal(sol.x, [1.0, 0.0])
    assert sol.iterations == 1
    assert sol.status is Status.CONVERGED


def test_pg_linear_rate():
    q, X, x0 = interior_instance()
    diag = np.sqrt(np.logspace(0, -1, 20))
    q = QuadraticForm(csr_from_dense(np.diag(diag)))
    ev = diag ** 2
    L, mu = ev.max(), ev.min()
    sol = projected_gradient(q, X, x0, L, StopCriterion(max_iters=200))
    f = np.array([r.f_value for r in sol.trace])
    ratios = f[1:] / f[:-1]
    # f* = 0 at the interior origin; each step contracts by (1 - mu/L)^2
    assert np.all(ratios <= 1 - mu / L + 1e-12)


def test_pg_errors():
    with pytest.raises(ValueError):
        projected_gradient(ONE, UNIT, [0.5], 0.0)
    with pytest.raises(ValueError):
        projected_gradient(ONE, UNIT, [3.0], 1.0)
