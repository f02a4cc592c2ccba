"""Projection-free conditional-gradient methods for doubly-sparse quadratics on boxes."""

__version__ = "0.1.0"

from .sparse import (  # noqa: E402
    OpCounter, CsrMatrix, csr_from_triplets, csr_from_dense, matvec, matvec_transpose,
    read_matrix_market, write_matrix_market,
)
from .objective import (  # noqa: E402
    QuadraticForm, ProxObjective, GradientState, estimate_spectral, exact_linesearch,
    gradient_step_update, init_state, refresh,
)
from .domains import (  # noqa: E402
    AxisBox, Simplex, AffineMap, lmo_box, lmo_simplex, intersect_box_ball,
    normalize_transform, box_diameter, contains,
)
from .solvers import (  # noqa: E402
    StepRule, StopCriterion, Status, IterRecord, Solution, frank_wolfe, fw_gap,
    shrinking_cg, monteiro_svaiter, projected_gradient,
)
from .diagnostics import (  # noqa: E402
    classic_iteration_bound, lmo_lower_bound, scg_iteration_bound, predictor_report, fit_rate,
)
from .problems import ProblemSpec, generate_problem  # noqa: E402
