"""
Accelerated proximal point with a Frank-Wolfe inner solver
==========================================================

Each outer step minimizes f(y) + kappa/2 ||y - x||^2 until the gradient of
that model is at most kappa/2 ||y - x||. On an ill-conditioned diagonal
instance whose minimizer lies well inside the box, f(y_k) k^2 stays roughly
constant, i.e. the outer loop converges like 1/k^2.
"""

import numpy as np

from shrinkcg import AxisBox, QuadraticForm, StopCriterion, monteiro_svaiter
from shrinkcg.problems import make_rng
from shrinkcg.sparse import csr_from_dense

n = 20
A = csr_from_dense(np.diag(np.sqrt(np.logspace(0, -3, n))))
q = QuadraticForm(A)
X = AxisBox.cube(n, 10.0)
x0 = make_rng(1).uniform(-1, 1, n)

sol = monteiro_svaiter(q, X, x0, kappa=1.0, stop=StopCriterion(max_iters=50))

for rec, acc in list(zip(sol.trace[1:], sol.info["accepted"]))[::7]:
    k = rec.outer_index
    print(f"k={k:>3}  f={rec.f_value:.3e}  f*k^2={rec.f_value * k * k:.3f}  "
          f"inner={acc['inner_iters']:>5}  |grad F|={acc['grad_norm']:.2e} <= {acc['rhs']:.2e}")
