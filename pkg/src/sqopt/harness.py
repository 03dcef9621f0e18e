"""Experiment configuration, deterministic multi-trial execution, CSV output.

All randomness derives from (config.seed, trial index), so a config fully
determines every output byte.  Curves are aggregated per recorded
iteration; the query axis differs per algorithm (SGQ/SAGA pay an n-query
initialization, SVRG pays n per snapshot) so curves can be compared on
the total-queries axis.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exceptions import ConfigError
from .optimizers import AlgoSpec, Trajectory, run_many
from .problems import FiniteSumProblem, make_quadratic_family

AGGREGATE_HEADER = "algo,t,queries,mean_gap,std_gap,n_trials"
RAW_HEADER_PREFIX = "algo,trial,t,queries"
BOUNDS_HEADER = "algo,t,bound_gap,excluded_terms_note"

_TOP_KEYS = {
    "problem", "x0", "alpha", "T", "trials", "seed",
    "algos", "record_every", "out_dir", "diagnostics",
}
_ALGO_KEYS = {"kind", "alpha", "p", "snapshot_every", "label"}
_PROBLEM_KEYS = {"type", "a", "b"}


@dataclass
class ExperimentConfig:
    problem: FiniteSumProblem
    x0: np.ndarray
    alpha: float
    T: int
    trials: int
    seed: int
    algos: List[AlgoSpec]
    record_every: int = 1
    out_dir: Path = Path(".")
    diagnostics: bool = False


@dataclass
class AggregateCurve:
    """Mean/std optimality gap over trials at each recorded iteration.

    std uses the population (divide-by-n) convention.
    """

    algo: str
    t: np.ndarray
    queries: np.ndarray
    mean_gap: np.ndarray
    std_gap: np.ndarray
    n_trials: int


@dataclass
class ExperimentResult:
    curves: Dict[str, AggregateCurve]
    raw: Optional[Dict[str, List[Trajectory]]]
    failures: Dict[str, List[Tuple[int, int]]]  # label -> [(trial, iteration)]


def _build_problem(spec, errors) -> Optional[FiniteSumProblem]:
    if not isinstance(spec, dict):
        errors.append("problem: must be an object")
        return None
    unknown = set(spec) - _PROBLEM_KEYS
    if unknown:
        errors.append(f"problem: unknown keys {sorted(unknown)}")
    if spec.get("type") != "quadratic":
        errors.append(f"problem.type: unsupported type {spec.get('type')!r}")
        return None
    try:
        return make_quadratic_family(spec.get("a", []), spec.get("b", []))
    except (ValueError, TypeError) as exc:
        errors.append(f"problem: {exc}")
        return None


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON experiment config (strict: unknown keys
    are errors, and all violations are reported together)."""
    path = Path(path)
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: line {exc.lineno}: {exc.msg}"]) from exc

    errors: List[str] = []
    unknown = set(data) - _TOP_KEYS
    if unknown:
        errors.append(f"unknown keys {sorted(unknown)}")
    for key in ("problem", "x0", "alpha", "T", "trials", "seed", "algos"):
        if key not in data:
            errors.append(f"missing required key {key!r}")

    problem = _build_problem(data.get("problem", {}), errors)

    alpha = data.get("alpha", 0)
    if not (isinstance(alpha, (int, float)) and alpha > 0):
        errors.append(f"alpha: must be positive, got {alpha!r}")
    T = data.get("T", 0)
    if not (isinstance(T, int) and T >= 1):
        errors.append(f"T: must be an integer >= 1, got {T!r}")
    trials = data.get("trials", 0)
    if not (isinstance(trials, int) and trials >= 1):
        errors.append(f"trials: must be an integer >= 1, got {trials!r}")
    seed = data.get("seed", 0)
    if not (isinstance(seed, int) and seed >= 0):
        errors.append(f"seed: must be a nonnegative integer, got {seed!r}")
    record_every = data.get("record_every", 1)
    if not (isinstance(record_every, int) and record_every >= 1):
        errors.append(f"record_every: must be an integer >= 1, got {record_every!r}")
    diagnostics = data.get("diagnostics", False)
    if not isinstance(diagnostics, bool):
        errors.append(f"diagnostics: must be a boolean, got {diagnostics!r}")

    algos: List[AlgoSpec] = []
    for idx, entry in enumerate(data.get("algos", [])):
        if not isinstance(entry, dict):
            errors.append(f"algos[{idx}]: must be an object")
            continue
        unknown = set(entry) - _ALGO_KEYS
        if unknown:
            errors.append(f"algos[{idx}]: unknown keys {sorted(unknown)}")
            continue
        try:
            algos.append(
                AlgoSpec(
                    kind=entry.get("kind", ""),
                    alpha=entry.get("alpha", alpha if isinstance(alpha, (int, float)) else 1),
                    p=entry.get("p"),
                    snapshot_every=entry.get("snapshot_every"),
                    label=entry.get("label"),
                )
            )
        except (ValueError, TypeError) as exc:
            errors.append(f"algos[{idx}]: {exc}")
    labels = [a.name for a in algos]
    if len(set(labels)) != len(labels):
        errors.append(f"algos: duplicate labels {labels} (set 'label' to disambiguate)")

    x0 = data.get("x0")
    x0_arr = None
    if problem is not None and x0 is not None:
        try:
            x0_arr = np.atleast_1d(np.asarray(x0, dtype=float))
            if x0_arr.shape != (problem.dim,):
                errors.append(f"x0: dimension {x0_arr.shape} does not match problem dim {problem.dim}")
        except (ValueError, TypeError):
            errors.append(f"x0: not numeric: {x0!r}")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        problem=problem,
        x0=x0_arr,
        alpha=float(alpha),
        T=T,
        trials=trials,
        seed=seed,
        algos=algos,
        record_every=record_every,
        out_dir=Path(data.get("out_dir", ".")),
        diagnostics=diagnostics,
    )


def recorded_steps(T: int, record_every: int) -> np.ndarray:
    """Iterations at which aggregates are recorded: 0, r, 2r, ..., and T."""
    ts = list(range(0, T + 1, record_every))
    if ts[-1] != T:
        ts.append(T)
    return np.asarray(ts, dtype=int)


def n_jobs_from_env() -> int:
    """Trial parallelism cap from SQO_THREADS (0 = auto, unset = serial)."""
    raw = os.environ.get("SQO_THREADS", "")
    if raw == "":
        return 1
    value = int(raw)
    return (os.cpu_count() or 1) if value == 0 else value


def aggregate(label: str, trajectories: List[Trajectory], ts: np.ndarray) -> AggregateCurve:
    """Population mean/std of the gap over surviving trials at recorded ts."""
    alive = [tr for tr in trajectories if tr.diverged_at is None]
    if not alive:
        raise RuntimeError(f"{label}: all trials diverged")
    gaps = np.stack([tr.gap[ts] for tr in alive])
    return AggregateCurve(
        algo=label,
        t=ts,
        queries=alive[0].queries[ts].copy(),
        mean_gap=gaps.mean(axis=0),
        std_gap=gaps.std(axis=0),  # ddof=0
        n_trials=len(alive),
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every configured algorithm for config.trials trials and aggregate."""
    ts = recorded_steps(config.T, config.record_every)
    n_jobs = n_jobs_from_env()
    curves: Dict[str, AggregateCurve] = {}
    raw: Dict[str, List[Trajectory]] = {}
    failures: Dict[str, List[Tuple[int, int]]] = {}
    for spec in config.algos:
        trajectories = run_many(
            spec, config.problem, config.x0, config.T, config.trials,
            config.seed, n_jobs=n_jobs,
        )
        failed = [
            (k, tr.diverged_at)
            for k, tr in enumerate(trajectories)
            if tr.diverged_at is not None
        ]
        if failed:
            failures[spec.name] = failed
        curves[spec.name] = aggregate(spec.name, trajectories, ts)
        if config.diagnostics:
            raw[spec.name] = trajectories
    return ExperimentResult(curves=curves, raw=raw if config.diagnostics else None,
                            failures=failures)


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain str for ints."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(curves: Dict[str, AggregateCurve], path) -> None:
    """Emit the aggregate CSV (one row per algo and recorded step)."""
    path = Path(path)
    lines = [AGGREGATE_HEADER]
    for curve in curves.values():
        for j in range(len(curve.t)):
            lines.append(
                ",".join([
                    curve.algo,
                    _fmt(curve.t[j]),
                    _fmt(curve.queries[j]),
                    _fmt(curve.mean_gap[j]),
                    _fmt(curve.std_gap[j]),
                    _fmt(curve.n_trials),
                ])
            )
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing aggregate CSV to {path}: {exc}") from exc


def write_raw_csv(raw: Dict[str, List[Trajectory]], path, dim: int) -> None:
    """Emit per-trial trajectories: algo,trial,t,queries,x0..,selected,explored,gap."""
    path = Path(path)
    header = RAW_HEADER_PREFIX + "," + ",".join(f"x{j}" for j in range(dim)) \
        + ",selected,explored,gap"
    lines = [header]
    for label, trajectories in raw.items():
        for k, tr in enumerate(trajectories):
            if tr.diverged_at is not None:
                continue
            for t in range(len(tr.gap)):
                row = [label, str(k), str(t), _fmt(tr.queries[t])]
                row.extend(_fmt(v) for v in tr.x[t])
                row.append(str(int(tr.selected[t])))
                row.append(str(int(tr.explored[t])))
                row.append(_fmt(tr.gap[t]))
                lines.append(",".join(row))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing raw CSV to {path}: {exc}") from exc


def write_bounds_csv(algo: str, t: np.ndarray, values: np.ndarray, note: str, path) -> None:
    """Emit a bound curve: algo,t,bound_gap,excluded_terms_note."""
    path = Path(path)
    lines = [BOUNDS_HEADER]
    for tj, vj in zip(t, values):
        lines.append(",".join([algo, _fmt(tj), _fmt(vj), note]))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing bounds CSV to {path}: {exc}") from exc
