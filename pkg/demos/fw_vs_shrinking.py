"""
Frank-Wolfe versus shrinking conditional gradient
==================================================

Both methods only ever call a linear minimization oracle over a box. When
the minimizer sits on a face of the box, plain Frank-Wolfe zigzags at the
O(1/k) rate. The restarted variant confines each round to a shrinking
infinity-norm ball around the last point and keeps making steady progress.
"""

import numpy as np

from shrinkcg import (QuadraticForm, StepRule, StopCriterion, estimate_spectral,
                      frank_wolfe, projected_gradient, shrinking_cg)
from shrinkcg.problems import ProblemSpec, generate_problem, make_rng

# A = I + sparse perturbation (at most 4 nonzeros per row and column) on a
# box shifted away from the origin, so the minimizer is on the boundary
n = 200
c = make_rng(7).uniform(-1.5, 1.5, n)
A, X = generate_problem(ProblemSpec(n=n, s=4, seed=3, box_lo=tuple(c - 1), box_hi=tuple(c + 1)))
q = QuadraticForm(A)
L, mu = estimate_spectral(q)
print(f"n={n}  nnz={A.nnz}  L={L:.3f}  mu={mu:.3f}")

x0 = X.hi.copy()
f_star = projected_gradient(q, X, x0, L, StopCriterion(1e-12, 10**6)).f_value

fw = frank_wolfe(q, X, x0, StepRule.EXACT, StopCriterion(1e-6, 20_000), hull=False)
print(f"Frank-Wolfe  {fw.iterations:>6} iterations  f - f* = {fw.f_value - f_star:.1e}")

for rule in StepRule:
    sol = shrinking_cg(q, X, x0, L, mu, 1e-6, rule)
    print(f"SCG/{rule.value:<8} {sol.iterations:>6} iterations  f - f* = {sol.f_value - f_star:.1e}"
          f"  ({sol.info['restarts']} restarts of {sol.info['inner_iters']})")

# error at the end of each restart, open-loop rule
sol = shrinking_cg(q, X, x0, L, mu, 1e-6, StepRule.STANDARD)
err = np.array(sol.info["restart_f"]) - f_star
print("f - f* per restart:", np.array2string(err[::3], precision=1))
