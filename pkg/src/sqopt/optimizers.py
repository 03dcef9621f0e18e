"""Iteration drivers for SGD, OGQ, SGQ and the SAGA/SVRG baselines.

Every driver produces a Trajectory with exact per-step query accounting:
SGD and OGQ cost 1 query per step; SGQ and SAGA pay an extra n-query
table initialization up front; SVRG pays n extra queries per snapshot.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import DivergenceError
from .problems import FiniteSumProblem, as_point
from .querying import (
    SurrogateTable,
    error_radius,
    expected_improvement,
    select_oracle,
    select_ucb,
    select_uniform,
    surrogate_expected_improvement,
)

DIVERGENCE_GAP = 1e12

VALID_KINDS = ("sgd", "ogq", "sgq", "saga", "svrg")


@dataclass
class StepDiagnostics:
    """Optional per-step snapshot for inequality checking."""

    ei_true: Optional[np.ndarray] = None
    ei_tilde: Optional[np.ndarray] = None
    radii: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """Per-iteration record of one run.

    Arrays have length T+1; entry t=0 is the initial state (selected=-1).
    selected[t] is the index used in the step from x[t-1] to x[t].
    """

    algo: str
    x: np.ndarray  # (T+1, d)
    selected: np.ndarray  # (T+1,)
    queries: np.ndarray  # (T+1,)
    gap: np.ndarray  # (T+1,)
    explored: np.ndarray  # (T+1,) bool
    diagnostics: Optional[List[StepDiagnostics]] = None
    diverged_at: Optional[int] = None

    @property
    def T(self) -> int:
        return len(self.gap) - 1


@dataclass(frozen=True)
class AlgoSpec:
    """Algorithm choice with hyperparameters."""

    kind: str
    alpha: float
    p: Optional[float] = None  # sgq only
    snapshot_every: Optional[int] = None  # svrg only
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.kind == "sgq":
            if self.p is None or not (0 < self.p <= 1):
                raise ValueError("sgq requires explore probability p in (0, 1]")
        if self.kind == "svrg":
            if self.snapshot_every is None or self.snapshot_every < 1:
                raise ValueError("svrg requires snapshot_every >= 1")

    @property
    def name(self) -> str:
        return self.label if self.label is not None else self.kind


def _alloc(algo: str, problem: FiniteSumProblem, x0, T: int, init_queries: int):
    x0 = as_point(x0, problem.dim)
    traj = Trajectory(
        algo=algo,
        x=np.empty((T + 1, problem.dim)),
        selected=np.full(T + 1, -1, dtype=int),
        queries=np.empty(T + 1, dtype=np.int64),
        gap=np.empty(T + 1),
        explored=np.zeros(T + 1, dtype=bool),
    )
    traj.x[0] = x0
    traj.queries[0] = init_queries
    traj.gap[0] = problem.optimality_gap(x0)
    return x0, traj


def _record(traj: Trajectory, problem, t, x, i, queries, explored=False):
    gap = problem.optimality_gap(x)
    traj.x[t] = x
    traj.selected[t] = i
    traj.queries[t] = queries
    traj.gap[t] = gap
    traj.explored[t] = explored
    if gap > DIVERGENCE_GAP:
        traj.diverged_at = t
        raise DivergenceError(t)


def run_sgd(problem: FiniteSumProblem, x0, alpha: float, T: int,
            rng: np.random.Generator) -> Trajectory:
    """Plain SGD with uniform component sampling; one query per step."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if T < 1:
        raise ValueError("T must be at least 1")
    x, traj = _alloc("sgd", problem, x0, T, init_queries=0)
    for t in range(T):
        i = select_uniform(rng, problem.n)
        x = x - alpha * problem.component_gradient(i, x)
        _record(traj, problem, t + 1, x, i, t + 1)
    return traj


def run_ogq(problem: FiniteSumProblem, x0, alpha: float, T: int,
            diagnostics: bool = False) -> Trajectory:
    """Oracle querying: step along the argmax-EI component each iteration.

    Deterministic; charged one query per step (idealized benchmark, the
    oracle information used for the argmax is treated as free).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x, traj = _alloc("ogq", problem, x0, T, init_queries=0)
    if diagnostics:
        traj.diagnostics = []
    for t in range(T):
        ei = expected_improvement(problem, x, alpha)
        i = select_oracle(ei)
        if diagnostics:
            traj.diagnostics.append(StepDiagnostics(ei_true=ei.ei.copy()))
        x = x - alpha * problem.component_gradient(i, x)
        _record(traj, problem, t + 1, x, i, t + 1)
    return traj


def run_sgq(problem: FiniteSumProblem, x0, alpha: float, p: float, T: int,
            rng: np.random.Generator, diagnostics: bool = False) -> Trajectory:
    """Strategic querying via a surrogate table and a UCB selection rule.

    With probability p the index is drawn uniformly (exploration),
    otherwise it maximizes surrogate EI plus staleness radius.  One
    uniform draw is consumed for the explore coin each step, and a
    second draw only on explore steps, so replay is well defined.
    Queries: n at initialization plus one per step.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not (0 < p <= 1):
        raise ValueError("p must lie in (0, 1]")
    n = problem.n
    L = problem.L
    L_i = problem.smoothness_constants
    x, traj = _alloc("sgq", problem, x0, T, init_queries=n)
    table = SurrogateTable.initialize(problem, x)
    if diagnostics:
        traj.diagnostics = []
    for t in range(T):
        xi = rng.random()
        explored = xi < p
        if explored:
            i = select_uniform(rng, n)
            if diagnostics:
                ei_tilde = surrogate_expected_improvement(table, alpha, L)
                radii = error_radius(table, x, alpha, L, L_i)
        else:
            ei_tilde = surrogate_expected_improvement(table, alpha, L)
            radii = error_radius(table, x, alpha, L, L_i)
            i = select_ucb(ei_tilde, radii)
        if diagnostics:
            ei_true = expected_improvement(problem, x, alpha)
            traj.diagnostics.append(
                StepDiagnostics(
                    ei_true=ei_true.ei.copy(),
                    ei_tilde=ei_tilde.ei.copy(),
                    radii=radii.copy(),
                )
            )
        g = problem.component_gradient(i, x)
        table.update(i, g, t, x)
        x = x - alpha * g
        _record(traj, problem, t + 1, x, i, n + t + 1, explored)
    return traj


def run_saga(problem: FiniteSumProblem, x0, alpha: float, T: int,
             rng: np.random.Generator) -> Trajectory:
    """SAGA with an n-query gradient table initialization at x0."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = problem.n
    x, traj = _alloc("saga", problem, x0, T, init_queries=n)
    stored = problem.component_gradients(x)
    avg = stored.mean(axis=0)
    for t in range(T):
        i = select_uniform(rng, n)
        g = problem.component_gradient(i, x)
        x = x - alpha * (g - stored[i] + avg)
        avg = avg + (g - stored[i]) / n
        stored[i] = g
        _record(traj, problem, t + 1, x, i, n + t + 1)
    return traj


def run_svrg(problem: FiniteSumProblem, x0, alpha: float, T: int,
             snapshot_every: int, rng: np.random.Generator) -> Trajectory:
    """SVRG: a full-gradient snapshot every snapshot_every iterations.

    Queries: one per step plus n at each snapshot (snapshots happen at
    t = 0, snapshot_every, 2*snapshot_every, ...).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if snapshot_every < 1:
        raise ValueError("snapshot_every must be at least 1")
    n = problem.n
    x, traj = _alloc("svrg", problem, x0, T, init_queries=0)
    snapshot = x
    snapshot_full = None
    queries = 0
    for t in range(T):
        if t % snapshot_every == 0:
            snapshot = x
            snapshot_full = problem.full_gradient(snapshot)
            queries += n
        i = select_uniform(rng, n)
        direction = (
            problem.component_gradient(i, x)
            - problem.component_gradient(i, snapshot)
            + snapshot_full
        )
        x = x - alpha * direction
        queries += 1
        _record(traj, problem, t + 1, x, i, queries)
    return traj


def run_one(spec: AlgoSpec, problem, x0, T, rng=None, diagnostics=False) -> Trajectory:
    """Run a single trial of the algorithm described by spec."""
    if spec.kind == "sgd":
        return run_sgd(problem, x0, spec.alpha, T, rng)
    if spec.kind == "ogq":
        return run_ogq(problem, x0, spec.alpha, T, diagnostics=diagnostics)
    if spec.kind == "sgq":
        return run_sgq(problem, x0, spec.alpha, spec.p, T, rng, diagnostics=diagnostics)
    if spec.kind == "saga":
        return run_saga(problem, x0, spec.alpha, T, rng)
    if spec.kind == "svrg":
        return run_svrg(problem, x0, spec.alpha, T, spec.snapshot_every, rng)
    raise ValueError(f"unknown algorithm kind {spec.kind!r}")


def _trial(spec, problem, x0, T, master_seed, k, diagnostics):
    rng = np.random.default_rng([master_seed, k])
    try:
        return run_one(spec, problem, x0, T, rng, diagnostics)
    except DivergenceError as exc:
        # Divergence is recorded, not fatal to the batch: stepsize sweeps
        # intentionally include divergent settings.
        traj = Trajectory(
            algo=spec.kind,
            x=np.empty((0, problem.dim)),
            selected=np.empty(0, dtype=int),
            queries=np.empty(0, dtype=np.int64),
            gap=np.empty(0),
            explored=np.empty(0, dtype=bool),
            diverged_at=exc.iteration,
        )
        return traj


def run_many(spec: AlgoSpec, problem, x0, T, trials, master_seed,
             n_jobs: int = 1, diagnostics: bool = False) -> List[Trajectory]:
    """Run independent trials, trial k seeded from (master_seed, k).

    Deterministic algorithms return identical trajectories for all k.
    Results are ordered by trial index regardless of execution order.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n_jobs == 0:
        n_jobs = os.cpu_count() or 1
    if n_jobs != 1 and trials > 1:
        from joblib import Parallel, delayed

        return Parallel(n_jobs=n_jobs)(
            delayed(_trial)(spec, problem, x0, T, master_seed, k, diagnostics)
            for k in range(trials)
        )
    return [
        _trial(spec, problem, x0, T, master_seed, k, diagnostics)
        for k in range(trials)
    ]
