"""Command line entry point: ``generate``, ``solve``, ``scan`` and ``predict``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .diagnostics import predictor_report
from .harness import OUTPUT_DIR_ENV, RunConfig, dimension_scan, run, write_scan_csv
from .problems import ProblemSpec, generate_problem
from .sparse import write_matrix_market

logger = logging.getLogger("shrinkcg")


def _add_problem_args(p):
    g = p.add_argument_group("problem")
    g.add_argument("--n", type=int, help="dimension")
    g.add_argument("--s", type=int, default=4, help="max nonzeros per row and column")
    g.add_argument("--mu", type=float, default=1.0, dest="mu_target", help="diagonal shift")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--offdiag-mass", type=float, default=0.5,
                   help="off-diagonal row/column mass as a fraction of mu")


def _add_run_args(p):
    p.add_argument("--config", help="JSON run config; flags given explicitly override it")
    p.add_argument("--matrix", dest="matrix_path", help="Matrix Market file instead of --n")
    p.add_argument("--solver", choices=["fw", "scg", "ms_fw", "pg"])
    p.add_argument("--rule", choices=["standard", "exact"])
    p.add_argument("--eps", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--max-lmo-calls", type=int)
    p.add_argument("--max-restarts", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--L", type=float, dest="L")
    p.add_argument("--mu-f", type=float, dest="mu", help="strong convexity modulus of f")
    p.add_argument("--output-dir", help=f"artifact directory (env {OUTPUT_DIR_ENV} overrides)")


def _config_from_args(args, **extra) -> RunConfig:
    d = {}
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    if args.n is not None:
        d["problem"] = ProblemSpec(args.n, args.s, args.mu_target, args.seed,
                                   args.offdiag_mass).to_dict()
        d.pop("matrix_path", None)
    for key in ("matrix_path", "solver", "rule", "eps", "max_iters", "max_lmo_calls",
                "max_restarts", "kappa", "L", "mu", "output_dir"):
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
            if key == "matrix_path":
                d.pop("problem", None)
    d.update({k: v for k, v in extra.items() if v is not None})
    return RunConfig.from_dict(d)


def cmd_generate(args) -> int:
    spec = ProblemSpec(args.n, args.s, args.mu_target, args.seed, args.offdiag_mass)
    A, _ = generate_problem(spec)
    write_matrix_market(args.out, A, comment=json.dumps(spec.to_dict(), sort_keys=True))
    print(f"wrote {args.out}: {A.n_rows}x{A.n_cols}, nnz={A.nnz}, "
          f"row/col nnz max {A.row_nnz_max}/{A.col_nnz_max}")
    return 0


def cmd_solve(args) -> int:
    try:
        config = _config_from_args(args, trace_path=args.trace, summary_path=args.summary)
    except (OSError, ValueError, TypeError) as exc:
        logger.error("%s", exc)
        return 1
    code = run(config)
    if code != 1:
        print(f"{config.solver}: exit {code}; artifacts in {config.resolved_output_dir()}")
    return code


def cmd_scan(args) -> int:
    try:
        extra = {}
        if args.solvers:
            extra["scan_solvers"] = args.solvers.split(",")
        if args.n is None and not args.config and not args.matrix_path:
            args.n = args.s  # placeholder; every scanned n replaces it
        config = _config_from_args(args, **extra)
        dims = [int(x) for x in args.dims.split(",")]
        rows = dimension_scan(config, dims)
        out = config.resolved_output_dir()
        out.mkdir(parents=True, exist_ok=True)
        write_scan_csv(out / args.out, rows)
    except (OSError, ValueError, TypeError) as exc:
        logger.error("%s", exc)
        return 1
    for r in rows:
        print(f"n={r['n']:>6} {r['solver']:>5}/{r['rule']:<8} iters={r['iters']:>7} "
              f"bound={r['scg_bound']:>7} f={r['f_value']:.3e} {r['status']}")
    return 0


def cmd_predict(args) -> int:
    try:
        report = predictor_report(args.n, args.L, args.mu, args.D, args.R0, args.eps)
    except ValueError as exc:
        logger.error("%s", exc)
        return 1
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shrinkcg", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random doubly-sparse matrix (Matrix Market)")
    _add_problem_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one solver, write trace CSV and summary JSON")
    _add_problem_args(p)
    _add_run_args(p)
    p.add_argument("--trace", help="trace CSV file name (default trace.csv)")
    p.add_argument("--summary", help="summary JSON file name (default summary.json)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="iterations versus dimension")
    _add_problem_args(p)
    _add_run_args(p)
    p.add_argument("--dims", default="16,64,256,1024")
    p.add_argument("--solvers", help="comma list like scg:standard,fw:exact")
    p.add_argument("--out", default="scan.csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("predict", help="print iteration-count predictors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--D", type=float, default=2.0, help="diameter for the Frank-Wolfe bounds")
    p.add_argument("--R0", type=float, default=2.0, help="initial ball radius")
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
