"""Expected-improvement machinery and query selection rules.

The expected improvement of stepping along one component gradient,

    EI_i(x) = alpha * <grad f(x), grad f_i(x)> - (alpha^2 L / 2) ||grad f_i(x)||^2,

lower-bounds the per-step objective decrease.  The surrogate variant
computes the same quantity from a table of stale, previously queried
gradients, and the staleness radius bounds the worst-case gap between
the two.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import NumericalError, UninitializedTableError
from .problems import FiniteSumProblem, as_point


@dataclass
class EIBreakdown:
    """Per-user expected improvement with its inner-product / norm parts.

    radius is only populated for surrogate-based values, where it holds
    the worst-case staleness error bound per user.
    """

    ei: np.ndarray
    inner: np.ndarray
    norm_sq: np.ndarray
    radius: Optional[np.ndarray] = None


def expected_improvement(problem: FiniteSumProblem, x, alpha: float) -> EIBreakdown:
    """True per-user expected improvement at x, using exact gradients."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    grads = problem.component_gradients(x)
    full = grads.mean(axis=0)
    inner = grads @ full
    norm_sq = np.sum(grads**2, axis=1)
    ei = alpha * inner - 0.5 * alpha**2 * problem.L * norm_sq
    return EIBreakdown(ei=ei, inner=inner, norm_sq=norm_sq)


@dataclass
class SurrogateTable:
    """Latest queried gradient per user, with its query time and anchor point.

    Single-writer state: confined to one trial's run, never shared.
    """

    tilde_grads: np.ndarray  # (n, d)
    tau: np.ndarray  # (n,), iteration of last query
    anchors: np.ndarray  # (n, d), iterate each gradient was taken at

    @classmethod
    def initialize(cls, problem: FiniteSumProblem, x0) -> "SurrogateTable":
        """Query every user once at x0 (costs n queries)."""
        x0 = as_point(x0, problem.dim)
        grads = problem.component_gradients(x0)
        n = problem.n
        return cls(
            tilde_grads=grads.copy(),
            tau=np.zeros(n, dtype=int),
            anchors=np.tile(x0, (n, 1)),
        )

    @property
    def n(self) -> int:
        return self.tilde_grads.shape[0]

    def tilde_full(self) -> np.ndarray:
        """Surrogate full gradient: mean of the stored gradients."""
        return self.tilde_grads.mean(axis=0)

    def update(self, i: int, grad: np.ndarray, t: int, x: np.ndarray) -> None:
        """Overwrite user i's entry with a freshly queried gradient."""
        self.tilde_grads[i] = grad
        self.tau[i] = t
        self.anchors[i] = x


def surrogate_expected_improvement(
    table: SurrogateTable, alpha: float, L: float
) -> EIBreakdown:
    """Per-user expected improvement computed purely from the table."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if table.tilde_grads.size == 0:
        raise UninitializedTableError("surrogate table is empty")
    full = table.tilde_full()
    inner = table.tilde_grads @ full
    norm_sq = np.sum(table.tilde_grads**2, axis=1)
    ei = alpha * inner - 0.5 * alpha**2 * L * norm_sq
    return EIBreakdown(ei=ei, inner=inner, norm_sq=norm_sq)


def error_radius(
    table: SurrogateTable, current_x, alpha: float, L: float, L_i
) -> np.ndarray:
    """Worst-case bound on |EI_i - surrogate EI_i| from gradient staleness.

    Staleness is measured from the stored anchor points, not accumulated
    displacements, so there is no drift.
    """
    L_i = np.asarray(L_i, dtype=float)
    current_x = np.atleast_1d(np.asarray(current_x, dtype=float))
    eps = L_i * np.linalg.norm(table.anchors - current_x, axis=1)
    eps_bar = eps.mean()
    tilde_norms = np.linalg.norm(table.tilde_grads, axis=1)
    tilde_full_norm = np.linalg.norm(table.tilde_full())
    return (
        (alpha * tilde_full_norm + alpha**2 * L * tilde_norms) * eps
        + alpha * tilde_norms * eps_bar
        + alpha * eps * eps_bar
        + 0.5 * alpha**2 * L * eps**2
    )


def select_uniform(rng: np.random.Generator, n: int) -> int:
    """Uniformly sample a user index in [0, n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return int(rng.integers(n))


def _ensure_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"non-finite {what} encountered: {values}")


def select_oracle(ei) -> int:
    """Index of the largest expected improvement (ties: lowest index)."""
    values = ei.ei if isinstance(ei, EIBreakdown) else np.asarray(ei, dtype=float)
    if values.size == 0:
        raise ValueError("empty EI vector")
    _ensure_finite(values, "EI")
    return int(np.argmax(values))


def select_ucb(ei_tilde, radii) -> int:
    """Index maximizing surrogate EI plus staleness radius (ties: lowest)."""
    values = (
        ei_tilde.ei if isinstance(ei_tilde, EIBreakdown) else np.asarray(ei_tilde, dtype=float)
    )
    radii = np.asarray(radii, dtype=float)
    if values.shape != radii.shape:
        raise ValueError("EI vector and radii must have matching lengths")
    _ensure_finite(values, "surrogate EI")
    _ensure_finite(radii, "radius")
    return int(np.argmax(values + radii))
