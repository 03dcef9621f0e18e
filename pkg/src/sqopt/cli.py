"""Command-line surface: run / verify / constants / bounds."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    SGQ_EXCLUDED_NOTE,
    BoundParams,
    bound_ogq,
    bound_sgd,
    bound_sgq,
    check_ei_variance_bound,
    estimate_C1_C2,
    estimate_Delta,
    tilde_c_supremum,
)
from .harness import (
    load_config,
    run_experiment,
    write_bounds_csv,
    write_csv,
    write_raw_csv,
)
from .verification import default_grid, run_all_checks


def _bound_params(config, grid) -> BoundParams:
    problem = config.problem
    c1, c2 = estimate_C1_C2(problem, grid)
    c = tilde_c_supremum(problem, config.alpha, grid)
    delta = estimate_Delta(problem)
    sgq_specs = [a for a in config.algos if a.kind == "sgq"]
    p = sgq_specs[0].p if sgq_specs else 1.0
    return BoundParams(
        alpha=config.alpha,
        mu=problem.mu,
        L=problem.L,
        L_max=problem.L_max,
        C1=c1.value,
        C2=c2.value,
        c=c.value,
        Delta=delta.value if not delta.unbounded else 0.0,
        p=p,
        sigma_star=problem.gradient_noise_at_optimum(),
        G0=problem.optimality_gap(config.x0),
        n=problem.n,
    )


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.out is not None:
        config.out_dir = Path(args.out)
    if args.diagnostics:
        config.diagnostics = True
    config.out_dir.mkdir(parents=True, exist_ok=True)
    result = run_experiment(config)
    write_csv(result.curves, config.out_dir / "aggregate.csv")
    if result.raw is not None:
        write_raw_csv(result.raw, config.out_dir / "raw.csv", config.problem.dim)
    if result.failures:
        report = {
            label: [{"trial": k, "iteration": it} for k, it in failed]
            for label, failed in result.failures.items()
        }
        (config.out_dir / "failures.json").write_text(json.dumps(report, indent=2))
    print(f"wrote {config.out_dir / 'aggregate.csv'}")
    return 0


def cmd_verify(args) -> int:
    config = load_config(args.config)
    results = run_all_checks(config)
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 1


def _parse_grid(spec: str) -> np.ndarray:
    lo, hi, points = spec.split(",")
    return np.linspace(float(lo), float(hi), int(points))


def cmd_constants(args) -> int:
    config = load_config(args.config)
    grid = _parse_grid(args.grid) if args.grid else default_grid(config.x0)
    problem = config.problem
    c1, c2 = estimate_C1_C2(problem, grid)
    c = tilde_c_supremum(problem, config.alpha, grid)
    delta = estimate_Delta(problem)
    a4 = check_ei_variance_bound(problem, min(config.alpha, 1 / (2 * problem.L)),
                           grid, c1.value, c2.value)
    report = {
        "C1": c1.value,
        "C2": c2.value,
        "c": c.value,
        "Delta": None if delta.unbounded else delta.value,
        "grid": {"lo": float(grid.min()), "hi": float(grid.max()),
                 "points": int(grid.size)},
        "attained_at": {"C1": c1.attained_at, "C2": c2.attained_at,
                        "c": c.attained_at},
        "ei_variance_bound_pass": a4.overall,
        "c_ge_4C2": c.value >= 4.0 * c2.value * (1.0 - 1e-9),
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_bounds(args) -> int:
    config = load_config(args.config)
    grid = _parse_grid(args.grid) if args.grid else default_grid(config.x0)
    params = _bound_params(config, grid)
    t = np.arange(config.T + 1)
    if args.algo == "sgd":
        values, note = bound_sgd(params, t), "none"
    elif args.algo == "ogq":
        values, note = bound_ogq(params, t), "none"
    elif args.algo == "sgq":
        values = bound_sgq(params, t, heuristic=args.heuristic)
        note = SGQ_EXCLUDED_NOTE
    else:
        print(f"no bound curve for algo {args.algo!r}", file=sys.stderr)
        return 2
    out = Path(args.out) if args.out else Path(f"bounds_{args.algo}.csv")
    write_bounds_csv(args.algo, t, np.asarray(values), note, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqopt",
        description="Strategic gradient-querying experiments and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and emit CSVs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--diagnostics", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run all property suites")
    p_verify.add_argument("--config", required=True)
    p_verify.set_defaults(func=cmd_verify)

    p_const = sub.add_parser("constants", help="emit the constants JSON report")
    p_const.add_argument("--config", required=True)
    p_const.add_argument("--grid", default=None, metavar="LO,HI,POINTS")
    p_const.set_defaults(func=cmd_constants)

    p_bounds = sub.add_parser("bounds", help="emit a bound curve CSV")
    p_bounds.add_argument("--config", required=True)
    p_bounds.add_argument("--algo", required=True, choices=["sgd", "ogq", "sgq"])
    p_bounds.add_argument("--grid", default=None, metavar="LO,HI,POINTS")
    p_bounds.add_argument("--out", default=None)
    p_bounds.add_argument("--heuristic", action="store_true",
                          help="skip the stepsize admissibility check")
    p_bounds.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
