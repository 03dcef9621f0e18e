"""Theoretical constants, closed-form bound curves, and inequality checkers.

Covers the heterogeneity constants C1/C2 (grid infima of moment ratios of
the component gradients), the EI spread ratio tilde_c and its grid
supremum c, the uniform gradient-deviation bound Delta, stepsize
admissibility conditions, and the closed-form gap bounds for SGD, OGQ
and SGQ (explicit terms only for SGQ).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import (
    DegenerateInputError,
    InvariantViolationError,
    StepsizeViolationError,
)
from .problems import FiniteSumProblem, QuadraticProblem
from .querying import expected_improvement

C_GE_4C2_SLACK = 1e-9

SGQ_EXCLUDED_NOTE = "O((1-p)*alpha^2) remainder excluded"


@dataclass(frozen=True)
class BoundParams:
    """Inputs to the closed-form gap bound curves."""

    alpha: float
    mu: float
    L: float
    L_max: float
    C1: float
    C2: float
    c: float
    Delta: float
    p: float
    sigma_star: float
    G0: float
    n: int

    def __post_init__(self):
        values = [
            self.alpha, self.mu, self.L, self.L_max, self.C1, self.C2,
            self.c, self.Delta, self.p, self.sigma_star, self.G0,
        ]
        if not all(math.isfinite(v) for v in values):
            raise InvariantViolationError("all bound parameters must be finite")
        if self.c < 4.0 * self.C2 * (1.0 - C_GE_4C2_SLACK):
            raise InvariantViolationError(
                f"c = {self.c} violates c >= 4*C2 = {4.0 * self.C2}"
            )


@dataclass(frozen=True)
class ConstantEstimate:
    """Extremum of a constant over a declared finite grid."""

    value: float
    grid: str
    attained_at: float


def _pointwise_gradient_stats(problem: FiniteSumProblem, grid):
    """Population mean/variance/skewness/kurtosis of {f_i'(x)} per grid point."""
    if problem.dim != 1:
        raise ValueError("gradient-moment statistics are defined for d=1 only")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    gbar = np.empty(grid.size)
    var = np.empty(grid.size)
    skew = np.empty(grid.size)
    kurt = np.empty(grid.size)
    for j, xj in enumerate(grid):
        g = problem.component_gradients(xj)[:, 0]
        m = g.mean()
        centered = g - m
        v = np.mean(centered**2)
        if v == 0.0:
            raise DegenerateInputError(
                f"all component gradients equal at x={xj}: kurtosis degenerate"
            )
        gbar[j] = m
        var[j] = v
        skew[j] = np.mean(centered**3) / v**1.5
        kurt[j] = np.mean(centered**4) / v**2
    return grid, gbar, var, skew, kurt


def estimate_C1_C2(
    problem: FiniteSumProblem, grid
) -> Tuple[ConstantEstimate, ConstantEstimate]:
    """Grid infima of the heterogeneity constants for a 1-D problem.

    C1's expression is undefined where the mean gradient vanishes; such
    grid points are excluded from the C1 infimum (noted in the grid
    description) but still contribute to C2.
    """
    grid, gbar, var, skew, kurt = _pointwise_gradient_stats(problem, grid)
    delta = 1.0 - skew / np.sqrt(kurt - 1.0)
    if np.any(delta <= 0):
        bad = grid[delta <= 0][0]
        raise InvariantViolationError(f"delta(x) <= 0 at x={bad}")

    grid_desc = f"grid [{grid.min():g}, {grid.max():g}] with {grid.size} points"

    c2_values = delta * (kurt - 1.0) * var**2 / (4.0 * (var + gbar**2) ** 2)
    j2 = int(np.argmin(c2_values))
    c2 = ConstantEstimate(float(c2_values[j2]), grid_desc, float(grid[j2]))

    usable = gbar != 0.0
    if not np.any(usable):
        raise DegenerateInputError("mean gradient vanishes on the entire grid")
    excluded = int(np.sum(~usable))
    c1_values = delta[usable] * var[usable] / (4.0 * gbar[usable] ** 2)
    j1 = int(np.argmin(c1_values))
    c1_desc = grid_desc
    if excluded:
        c1_desc += f" ({excluded} zero-mean-gradient point(s) excluded)"
    c1 = ConstantEstimate(float(c1_values[j1]), c1_desc, float(grid[usable][j1]))
    return c1, c2


def tilde_c(ei) -> float:
    """Spread ratio (mean - min) / (max - mean) of an EI vector."""
    ei = np.asarray(ei, dtype=float)
    m = ei.mean()
    top = ei.max()
    if top <= m:
        raise DegenerateInputError("max equals mean: spread ratio undefined")
    return float((m - ei.min()) / (top - m))


def tilde_c_supremum(problem: FiniteSumProblem, alpha: float, grid) -> ConstantEstimate:
    """Maximum of tilde_c over EI vectors evaluated on a finite grid."""
    grid = np.asarray(grid, dtype=float)
    best = -np.inf
    best_x = float(grid[0])
    for xj in grid:
        values = expected_improvement(problem, xj, alpha).ei
        if values.max() <= values.mean():
            continue  # degenerate point, ratio undefined
        tc = tilde_c(values)
        if tc > best:
            best = tc
            best_x = float(xj)
    if not math.isfinite(best):
        raise DegenerateInputError("tilde_c undefined at every grid point")
    desc = f"grid [{grid.min():g}, {grid.max():g}] with {grid.size} points"
    return ConstantEstimate(float(best), desc, best_x)


@dataclass
class EIVarianceBoundReport:
    """Per-grid-point evaluation of the EI-variance lower bound."""

    points: np.ndarray
    lhs: np.ndarray  # Var of the EI values
    rhs: np.ndarray  # C1/C2 lower bound
    passed: np.ndarray

    @property
    def overall(self) -> bool:
        return bool(np.all(self.passed))


def check_ei_variance_bound(
    problem: FiniteSumProblem, alpha: float, grid, C1: float, C2: float
) -> EIVarianceBoundReport:
    """Check Var[EI_i(x)] >= C1 a^2 ||grad f||^4 + C2 a^4 L^2 (mean ||grad f_i||^2)^2."""
    if not (0 < alpha <= 1.0 / (2.0 * problem.L)):
        raise StepsizeViolationError(
            f"alpha must lie in (0, 1/(2L)] = (0, {1.0 / (2.0 * problem.L)}]"
        )
    grid = np.asarray(grid, dtype=float)
    L = problem.L
    lhs = np.empty(grid.size)
    rhs = np.empty(grid.size)
    for j, xj in enumerate(grid):
        bd = expected_improvement(problem, xj, alpha)
        lhs[j] = np.mean((bd.ei - bd.ei.mean()) ** 2)
        full_sq = float(np.sum(problem.full_gradient(xj) ** 2))
        mean_norm_sq = float(bd.norm_sq.mean())
        rhs[j] = C1 * alpha**2 * full_sq**2 + C2 * alpha**4 * L**2 * mean_norm_sq**2
    passed = lhs >= rhs - 1e-9 * np.abs(rhs) - 1e-300
    return EIVarianceBoundReport(points=grid, lhs=lhs, rhs=rhs, passed=passed)


@dataclass
class VarianceTransferReport:
    points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    passed: np.ndarray

    @property
    def overall(self) -> bool:
        return bool(np.all(self.passed))


def check_variance_transfer(problem: FiniteSumProblem, samples) -> VarianceTransferReport:
    """Check mean ||grad f_i(x)||^2 <= 4 L_max (f(x) - inf f) + 2 sigma*."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    sigma_star = problem.gradient_noise_at_optimum()
    L_max = problem.L_max
    lhs = np.empty(len(samples))
    rhs = np.empty(len(samples))
    for j, xj in enumerate(samples):
        grads = problem.component_gradients(xj)
        lhs[j] = np.mean(np.sum(grads**2, axis=1))
        rhs[j] = 4.0 * L_max * problem.optimality_gap(xj) + 2.0 * sigma_star
    passed = lhs <= rhs + 1e-9
    return VarianceTransferReport(points=samples, lhs=lhs, rhs=rhs, passed=passed)


@dataclass(frozen=True)
class StepsizeCondition:
    name: str
    threshold: float
    ok: bool
    margin: float  # threshold - alpha; negative means violated


@dataclass(frozen=True)
class AdmissibilityReport:
    algo: str
    alpha: float
    conditions: Tuple[StepsizeCondition, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions)


def stepsize_admissible(algo: str, params: BoundParams) -> AdmissibilityReport:
    """Evaluate the stepsize conditions of the gap bounds with margins."""
    a, mu, L, L_max = params.alpha, params.mu, params.L, params.L_max
    conditions = [
        StepsizeCondition("alpha > 0", 0.0, a > 0, a),
    ]
    if algo in ("sgd", "ogq"):
        thr = mu / (2.0 * L * L_max)
        conditions.append(
            StepsizeCondition("alpha <= mu/(2*L*L_max)", thr, a <= thr, thr - a)
        )
    elif algo == "sgq":
        p, n = params.p, params.n
        thr1 = (1.0 - math.sqrt(1.0 - p / (2.0 * n))) / L_max
        thr2 = mu / (4.0 * L * L_max)
        if p < 1.0:
            thr3 = p / (96.0 * n * (L + L_max)) / (1.0 - p)
        else:
            thr3 = math.inf
        for name, thr in [
            ("alpha <= (1 - sqrt(1 - p/(2n)))/L_max", thr1),
            ("alpha <= mu/(4*L*L_max)", thr2),
            ("alpha <= p/(96n(L+L_max)(1-p))", thr3),
        ]:
            conditions.append(StepsizeCondition(name, thr, a <= thr, thr - a))
    else:
        raise ValueError(f"no stepsize condition defined for algo {algo!r}")
    return AdmissibilityReport(algo=algo, alpha=a, conditions=tuple(conditions))


def _require_admissible(algo: str, params: BoundParams) -> None:
    report = stepsize_admissible(algo, params)
    if not report.ok:
        worst = min((c for c in report.conditions if not c.ok), key=lambda c: c.margin)
        raise StepsizeViolationError(
            f"{algo}: stepsize {params.alpha} violates {worst.name} "
            f"(threshold {worst.threshold}, margin {worst.margin})"
        )


def bound_sgd(params: BoundParams, t):
    """Closed-form SGD gap bound (1 - a*mu)^t G0 + (a*L/mu) sigma*."""
    _require_admissible("sgd", params)
    t = np.asarray(t)
    decay = (1.0 - params.alpha * params.mu) ** t
    return decay * params.G0 + (params.alpha * params.L / params.mu) * params.sigma_star


def ogq_decay_factor(params: BoundParams) -> float:
    """Per-step contraction factor of the OGQ gap bound."""
    boost = math.sqrt(2.0) * (math.sqrt(params.C1) + math.sqrt(params.C2)) / math.sqrt(params.c)
    return 1.0 - (1.0 + boost) * params.alpha * params.mu


def bound_ogq(params: BoundParams, t):
    """Closed-form OGQ gap bound with heterogeneity-boosted decay."""
    _require_admissible("ogq", params)
    if params.c < 4.0 * params.C2 * (1.0 - C_GE_4C2_SLACK):
        raise InvariantViolationError("bound requires c >= 4*C2")
    t = np.asarray(t)
    half_c = math.sqrt(params.c / 2.0)
    sc1, sc2 = math.sqrt(params.C1), math.sqrt(params.C2)
    steady = (
        (params.alpha * params.L / params.mu)
        * (half_c - sc2) / (half_c + sc1 + sc2)
        * params.sigma_star
    )
    return ogq_decay_factor(params) ** t * params.G0 + steady


def bound_sgq(params: BoundParams, t, heuristic: bool = False):
    """Explicit terms of the SGQ gap bound; the O((1-p) alpha^2) remainder
    is excluded (no computable constant).

    heuristic=True skips the stepsize admissibility check, for plotting
    the curve at experimentally used stepsizes above the threshold.
    """
    if not heuristic:
        _require_admissible("sgq", params)
    t = np.asarray(t)
    a, mu, L, L_max = params.alpha, params.mu, params.L, params.L_max
    p, n = params.p, params.n
    sc1, sc2 = math.sqrt(params.C1), math.sqrt(params.C2)
    root_2c = math.sqrt(2.0 * params.c)
    mix = (1.0 - p) * (2.0 * sc1 + sc2)
    decay = (1.0 - (1.0 + mix / root_2c) * a * mu) ** t * params.G0
    delta_term = (
        24.0 * a * (L + L_max) * n / (p * mu)
        * (1.0 - p) * root_2c / (root_2c + mix)
        * params.Delta**2
    )
    sigma_term = (
        (a * L / mu) * (root_2c - 2.0 * (1.0 - p) * sc2) / (root_2c + mix)
        * params.sigma_star
    )
    return decay + delta_term + sigma_term


@dataclass(frozen=True)
class DeltaEstimate:
    """Uniform bound on ||grad f_i(x) - grad f(x)||.

    exact: closed form (equal-curvature quadratics); otherwise a sampled
    supremum, which is a lower estimate of the true supremum.
    unbounded: no finite Delta exists for this family.
    """

    value: float
    exact: bool
    unbounded: bool


def estimate_Delta(problem: FiniteSumProblem, samples=None) -> DeltaEstimate:
    """Exact Delta for equal-curvature quadratics, else a sampled supremum."""
    if isinstance(problem, QuadraticProblem):
        if np.ptp(problem.a) > 0:
            # grad f_i - grad f grows linearly in x when curvatures differ
            return DeltaEstimate(math.inf, exact=True, unbounded=True)
        b_bar = problem.b.mean(axis=0)
        value = 2.0 * float(problem.a[0]) * float(
            np.max(np.linalg.norm(problem.b - b_bar, axis=1))
        )
        return DeltaEstimate(value, exact=True, unbounded=False)
    if samples is None:
        raise ValueError("samples required for problems without closed-form Delta")
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    worst = 0.0
    for xj in samples:
        grads = problem.component_gradients(xj)
        dev = np.linalg.norm(grads - grads.mean(axis=0), axis=1)
        worst = max(worst, float(dev.max()))
    return DeltaEstimate(worst, exact=False, unbounded=False)


@dataclass
class TildeCSummary:
    """Empirical distribution of tilde_c for i.i.d. samples."""

    samples: np.ndarray
    n: int
    quantile: float  # the (1 - 1/n)-quantile
    cap: float  # hard cap n - 1


def monte_carlo_tilde_c(dist, n: int, trials: int, rng: np.random.Generator) -> TildeCSummary:
    """Distribution of the spread ratio for i.i.d. draws.

    dist is ("gaussian", sigma) or ("bounded", B); bounded means
    uniform on [-B, B].
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    kind, scale = dist
    values = np.empty(trials)
    for k in range(trials):
        if kind == "gaussian":
            draws = rng.normal(0.0, scale, size=n)
        elif kind == "bounded":
            draws = rng.uniform(-scale, scale, size=n)
        else:
            raise ValueError(f"unknown distribution kind {kind!r}")
        values[k] = tilde_c(draws)
    cap = float(n - 1)
    if np.any(values > cap + 1e-9):
        raise InvariantViolationError("spread ratio exceeded its n-1 cap")
    return TildeCSummary(
        samples=values,
        n=n,
        quantile=float(np.quantile(values, 1.0 - 1.0 / n)),
        cap=cap,
    )
