"""Property suites: every testable inequality checked on live runs.

These back the `verify` CLI command.  Each check returns a CheckResult;
the suite passes iff all checks pass.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .analysis import (
    estimate_C1_C2,
    monte_carlo_tilde_c,
    tilde_c,
    tilde_c_supremum,
    check_variance_transfer,
)
from .harness import ExperimentConfig, aggregate, recorded_steps
from .optimizers import AlgoSpec, run_many, run_ogq, run_sgd, run_sgq
from .problems import FiniteSumProblem
from .querying import expected_improvement


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def default_grid(x0, points: int = 401) -> np.ndarray:
    """Symmetric grid spanning [-(|x0|+1), |x0|+1]."""
    radius = float(np.max(np.abs(x0))) + 1.0
    return np.linspace(-radius, radius, points)


def check_descent_lemma(problem, x0, alpha, seed, total_steps=10_000) -> CheckResult:
    """f(x_t) - f(x_{t+1}) >= EI_{i_t}(x_t) - 1e-9 on steps sampled across
    SGD, OGQ and SGQ runs."""
    per_algo = total_steps // 4
    runs = [
        run_sgd(problem, x0, alpha, per_algo, np.random.default_rng([seed, 101])),
        run_sgd(problem, x0, alpha, per_algo, np.random.default_rng([seed, 102])),
        run_ogq(problem, x0, alpha, per_algo),
        run_sgq(problem, x0, alpha, 0.3, per_algo, np.random.default_rng([seed, 103])),
    ]
    worst = np.inf
    checked = 0
    for tr in runs:
        for t in range(tr.T):
            ei = expected_improvement(problem, tr.x[t], alpha).ei
            drop = problem.value(tr.x[t]) - problem.value(tr.x[t + 1])
            worst = min(worst, drop - ei[tr.selected[t + 1]])
            checked += 1
    return CheckResult(
        "descent lemma",
        worst >= -1e-9,
        f"min margin {worst:.3e} over {checked} steps",
    )


def check_surrogate_error_and_regret(problem, x0, alpha, p, T, seed):
    """Surrogate-EI error bound and UCB regret, on a diagnostic SGQ run."""
    tr = run_sgq(problem, x0, alpha, p, T, np.random.default_rng([seed, 201]),
                 diagnostics=True)
    worst_err = np.inf
    worst_regret = np.inf
    ucb_steps = 0
    for t, diag in enumerate(tr.diagnostics):
        margin = diag.radii + 1e-9 - np.abs(diag.ei_true - diag.ei_tilde)
        worst_err = min(worst_err, float(margin.min()))
        if not tr.explored[t + 1]:
            i_star = int(np.argmax(diag.ei_true))
            i_t = int(tr.selected[t + 1])
            regret = diag.ei_true[i_star] - diag.ei_true[i_t]
            worst_regret = min(worst_regret, 2.0 * diag.radii[i_t] + 1e-9 - regret)
            ucb_steps += 1
    err = CheckResult(
        "surrogate EI error bound",
        worst_err >= 0,
        f"min slack {worst_err:.3e} over {T} steps",
    )
    regret = CheckResult(
        "UCB selection regret",
        worst_regret >= 0,
        f"min slack {worst_regret:.3e} over {ucb_steps} UCB steps",
    )
    return [err, regret]


def check_popoviciu_lemma(problem, alpha, grid) -> CheckResult:
    """Var <= (max-mean)(mean-min) and max-mean >= sqrt(Var/tilde_c) per point."""
    worst_pop = np.inf
    worst_gap = np.inf
    for xj in np.asarray(grid, dtype=float):
        ei = expected_improvement(problem, xj, alpha).ei
        m, top, bot = ei.mean(), ei.max(), ei.min()
        var = np.mean((ei - m) ** 2)
        worst_pop = min(worst_pop, (top - m) * (m - bot) + 1e-12 - var)
        if top > m:
            worst_gap = min(
                worst_gap, (top - m) - np.sqrt(var / tilde_c(ei)) + 1e-12
            )
    return CheckResult(
        "Popoviciu and per-point EI spread bound",
        worst_pop >= 0 and worst_gap >= 0,
        f"min slack popoviciu {worst_pop:.3e}, spread {worst_gap:.3e}",
    )


def check_variance_transfer_sampled(problem, x0, seed, points=1000) -> CheckResult:
    rng = np.random.default_rng([seed, 301])
    radius = float(np.max(np.abs(x0))) + 1.0
    samples = rng.uniform(-radius, radius, size=(points, problem.dim))
    report = check_variance_transfer(problem, samples)
    slack = float(np.min(report.rhs - report.lhs))
    return CheckResult(
        "variance transfer",
        report.overall,
        f"min slack {slack:.3e} over {points} points",
    )


def check_c_ge_4C2(problem, alpha, grid) -> CheckResult:
    _, c2 = estimate_C1_C2(problem, grid)
    c = tilde_c_supremum(problem, alpha, grid)
    ok = c.value >= 4.0 * c2.value * (1.0 - 1e-9)
    return CheckResult(
        "c >= 4*C2 on common grid",
        ok,
        f"c = {c.value:.6g}, 4*C2 = {4.0 * c2.value:.6g}",
    )


def check_sgq_p1_matches_sgd(problem, x0, alpha, seed, T=500, trials=200,
                             record_every=10) -> CheckResult:
    """Mean-gap curves of SGQ(p=1) and SGD agree within 3 standard errors."""
    ts = recorded_steps(T, record_every)
    sgd = aggregate("sgd", run_many(
        AlgoSpec("sgd", alpha), problem, x0, T, trials, seed), ts)
    sgq = aggregate("sgq", run_many(
        AlgoSpec("sgq", alpha, p=1.0), problem, x0, T, trials, seed + 1), ts)
    se = np.sqrt(sgd.std_gap**2 + sgq.std_gap**2) / np.sqrt(trials)
    diff = np.abs(sgd.mean_gap - sgq.mean_gap)
    worst = float(np.max(diff - 3.0 * se))
    return CheckResult(
        "SGQ(p=1) distributionally matches SGD",
        bool(np.all(diff <= 3.0 * se)),
        f"max excess over 3 SE: {worst:.3e}",
    )


def check_tilde_c_monte_carlo(seed, trials=2000) -> List[CheckResult]:
    rng = np.random.default_rng([seed, 401])
    results = []

    g64 = monte_carlo_tilde_c(("gaussian", 1.0), 64, trials, rng)
    g1024 = monte_carlo_tilde_c(("gaussian", 1.0), 1024, trials, rng)
    cap_ok = bool(
        np.all(g64.samples <= g64.cap + 1e-9)
        and np.all(g1024.samples <= g1024.cap + 1e-9)
    )
    results.append(CheckResult(
        "spread ratio hard cap n-1", cap_ok,
        f"max at n=64: {g64.samples.max():.3f}, n=1024: {g1024.samples.max():.3f}",
    ))

    limit = np.sqrt(np.log(1024) / np.log(64)) * 2.0
    ratio = g1024.quantile / g64.quantile
    results.append(CheckResult(
        "sub-gaussian quantile growth ~ sqrt(log n)",
        ratio <= limit,
        f"quantile ratio {ratio:.3f} <= {limit:.3f}",
    ))

    b64 = monte_carlo_tilde_c(("bounded", 1.0), 64, trials, rng)
    b1024 = monte_carlo_tilde_c(("bounded", 1.0), 1024, trials, rng)
    hi, lo = max(b64.quantile, b1024.quantile), min(b64.quantile, b1024.quantile)
    results.append(CheckResult(
        "bounded case quantile non-growing",
        hi / lo <= 3.0,
        f"quantiles n=64: {b64.quantile:.3f}, n=1024: {b1024.quantile:.3f}",
    ))
    return results


def run_all_checks(config: ExperimentConfig) -> List[CheckResult]:
    """The full property suite behind `verify`."""
    problem, x0, alpha, seed = config.problem, config.x0, config.alpha, config.seed
    results: List[CheckResult] = []
    results.append(check_descent_lemma(problem, x0, alpha, seed))
    sgq_specs = [a for a in config.algos if a.kind == "sgq"]
    p = sgq_specs[0].p if sgq_specs else 0.3
    results.extend(check_surrogate_error_and_regret(
        problem, x0, alpha, p, min(config.T, 2000), seed))
    if problem.dim == 1:
        grid = default_grid(x0)
        results.append(check_popoviciu_lemma(problem, alpha, grid))
        results.append(check_c_ge_4C2(problem, alpha, grid))
    results.append(check_variance_transfer_sampled(problem, x0, seed))
    results.append(check_sgq_p1_matches_sgd(problem, x0, alpha, seed))
    results.extend(check_tilde_c_monte_carlo(seed))
    return results
