"""Experiment orchestration: solve runs, trace/summary artifacts, dimension scans."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import predictor_report
from .domains import AxisBox
from .objective import QuadraticForm, SpectralEstimationError, estimate_spectral
from .problems import ProblemSpec, generate_problem, random_point
from .solvers import (
    Status,
    StepRule,
    StopCriterion,
    frank_wolfe,
    monteiro_svaiter,
    projected_gradient,
    shrinking_cg,
)
from .sparse import read_matrix_market

logger = logging.getLogger(__name__)

__all__ = [
    "OUTPUT_DIR_ENV",
    "TRACE_HEADER",
    "SCAN_HEADER",
    "EXIT_CODES",
    "RunConfig",
    "RunResult",
    "load_problem",
    "solve",
    "run",
    "write_trace_csv",
    "dimension_scan",
    "write_scan_csv",
]

OUTPUT_DIR_ENV = "SHRINKCG_OUTPUT_DIR"
TRACE_HEADER = ["outer", "inner", "f_value", "fw_gap", "gamma", "radius",
                "lmo_count", "matvec_count", "elapsed_ns"]
SCAN_HEADER = ["n", "solver", "rule", "status", "iters", "lmo_calls", "matvecs", "wall_ns",
               "f_value", "fw_gap", "L", "mu", "scg_bound", "lmo_lower_bound", "classic_bound"]
EXIT_CODES = {Status.CONVERGED: 0, Status.ITER_LIMIT: 2, Status.CONDITION_UNREACHABLE: 3}
SOLVERS = ("fw", "scg", "ms_fw", "pg")


@dataclass
class RunConfig:
    problem: ProblemSpec | None = None
    matrix_path: str | None = None
    solver: str = "scg"
    rule: StepRule = StepRule.EXACT
    eps: float = 1e-6
    max_iters: int | None = None
    max_lmo_calls: int | None = None
    max_restarts: int | None = None
    L: float | None = None
    mu: float | None = None
    kappa: float | None = None
    x0_seed: int | None = None
    output_dir: str = "."
    trace_path: str | None = "trace.csv"
    summary_path: str | None = "summary.json"
    scan_solvers: list = field(default_factory=lambda: ["scg:standard", "scg:exact", "fw:exact"])

    def __post_init__(self):
        if isinstance(self.rule, str):
            self.rule = StepRule(self.rule)
        if isinstance(self.problem, dict):
            self.problem = ProblemSpec.from_dict(self.problem)
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")
        if (self.problem is None) == (self.matrix_path is None):
            raise ValueError("config needs exactly one of 'problem' or 'matrix_path'")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rule"] = self.rule.value
        d["problem"] = self.problem.to_dict() if self.problem else None
        return d

    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_DIR_ENV) or self.output_dir)


@dataclass
class RunResult:
    solution: object
    L: float
    mu: float
    box: AxisBox
    n: int
    wall_ns: int

    @property
    def status(self) -> Status:
        return self.solution.status


def load_problem(config: RunConfig):
    if config.matrix_path is not None:
        if not Path(config.matrix_path).is_file():
            raise FileNotFoundError(f"matrix file not found: {config.matrix_path}")
        A = read_matrix_market(config.matrix_path)
        if A.n_rows != A.n_cols:
            raise ValueError("matrix must be square")
        return A, AxisBox.cube(A.n_cols)
    return generate_problem(config.problem)


def solve(config: RunConfig, A=None, box=None) -> RunResult:
    """Run the configured solver in memory (no files written)."""
    if A is None:
        A, box = load_problem(config)
    q = QuadraticForm(A)
    if config.L is None or config.mu is None:
        L_est, mu_est = estimate_spectral(q)
    L = config.L if config.L is not None else L_est
    mu = config.mu if config.mu is not None else mu_est
    seed = config.x0_seed if config.x0_seed is not None else (
        config.problem.seed if config.problem else 0)
    x0 = random_point(box, seed)
    stop = StopCriterion(config.eps, config.max_iters, config.max_lmo_calls)
    t0 = time.perf_counter_ns()
    if config.solver == "fw":
        sol = frank_wolfe(q, box, x0, config.rule, stop)
    elif config.solver == "scg":
        sol = shrinking_cg(q, box, x0, L, mu, config.eps, config.rule,
                           max_restarts=config.max_restarts, max_iters=config.max_iters)
    elif config.solver == "ms_fw":
        sol = monteiro_svaiter(q, box, x0, config.kappa or L, stop)
    else:
        sol = projected_gradient(q, box, x0, L, stop)
    return RunResult(sol, L, mu, box, q.n, time.perf_counter_ns() - t0)


def _fmt(v) -> str:
    return repr(float(v))


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in trace:
            w.writerow([r.outer_index, r.inner_index, _fmt(r.f_value), _fmt(r.fw_gap),
                        _fmt(r.gamma), _fmt(r.radius), r.lmo_count, r.matvec_count,
                        r.elapsed_ns])


def summary_dict(config: RunConfig, result: RunResult) -> dict:
    sol = result.solution
    report = None
    if result.mu > 0 and result.box.diameter() > 0:
        report = predictor_report(result.n, result.L, result.mu, result.box.diameter2(),
                                  result.box.diameter(), config.eps).to_dict()
    return {
        "version": __version__,
        "problem": config.problem.to_dict() if config.problem else {"matrix_path": config.matrix_path},
        "solver": config.solver,
        "rule": config.rule.value,
        "eps": config.eps,
        "status": sol.status.value,
        "f_value": sol.f_value,
        "fw_gap": sol.info.get("final_gap", sol.trace[-1].fw_gap),
        "totals": {
            "iterations": sol.iterations,
            "lmo_calls": sol.info.get("lmo_count", 0),
            "matvecs": sol.info.get("matvec_count", 0),
            "restarts": sol.info.get("restarts"),
        },
        "L": result.L,
        "mu": result.mu,
        "predictor": report,
    }


def run(config: RunConfig) -> int:
    """Execute a configured run and write its artifacts; returns the exit code."""
    try:
        result = solve(config)
        out = config.resolved_output_dir()
        out.mkdir(parents=True, exist_ok=True)
        if config.trace_path:
            write_trace_csv(out / config.trace_path, result.solution.trace)
        if config.summary_path:
            with open(out / config.summary_path, "w") as fh:
                json.dump(summary_dict(config, result), fh, indent=2, sort_keys=True)
                fh.write("\n")
    except (OSError, ValueError, SpectralEstimationError) as exc:
        logger.error("%s", exc)
        return 1
    return EXIT_CODES[result.status]


def _parse_solver(item: str):
    name, _, rule = item.partition(":")
    return name, StepRule(rule) if rule else None


def dimension_scan(base: RunConfig, dims) -> list[dict]:
    """Run each configured solver on one generated instance per dimension.

    Instance ``n`` uses ``seed = base.problem.seed + n`` and ``s = min(s, n)``.
    ``scan_solvers`` entries look like ``"scg:standard"`` or ``"fw:exact"``.
    """
    dims = list(dims)
    if not dims:
        raise ValueError("dims must be non-empty")
    if base.problem is None:
        raise ValueError("dimension scan needs a generated problem spec")
    rows = []
    for n in dims:
        spec = replace(base.problem, n=n, s=min(base.problem.s, n), seed=base.problem.seed + n)
        A, box = generate_problem(spec)
        L, mu = estimate_spectral(QuadraticForm(A))
        report = predictor_report(n, L, mu, box.diameter2(), box.diameter(), base.eps)
        for item in base.scan_solvers:
            name, rule = _parse_solver(item)
            cfg = replace(base, problem=spec, solver=name, rule=rule or base.rule, L=L, mu=mu)
            res = solve(cfg, A, box)
            sol = res.solution
            rows.append({
                "n": n, "solver": name, "rule": cfg.rule.value, "status": sol.status.value,
                "iters": sol.iterations, "lmo_calls": sol.info.get("lmo_count", 0),
                "matvecs": sol.info.get("matvec_count", 0), "wall_ns": res.wall_ns,
                "f_value": sol.f_value, "fw_gap": sol.info.get("final_gap", np.nan),
                "L": L, "mu": mu, "scg_bound": report.scg_total_inner_iters,
                "lmo_lower_bound": report.lmo_lower_bound,
                "classic_bound": report.classic_fw_iters,
            })
            logger.info("n=%d %s/%s: %d iterations, status %s", n, name, cfg.rule.value,
                        sol.iterations, sol.status.value)
    return rows


def write_scan_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SCAN_HEADER, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
