"""Finite-sum objectives f(x) = (1/n) sum_i f_i(x) with exact constants.

Problem families are closed form (quadratics), so smoothness constants,
the PL constant, the minimizer and the gradient noise at the optimum are
all exact rather than estimated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    NumericalInconsistencyError,
    UnsupportedQueryError,
)

GAP_NEGATIVE_TOL = 1e-12


@dataclass(frozen=True)
class ComponentFunction:
    """One user's cost function with its gradient and smoothness constant."""

    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    smoothness: float


def as_point(x, dim: int) -> np.ndarray:
    """Coerce x to a float vector of length dim (scalars allowed for dim=1)."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.shape != (dim,):
        raise DimensionMismatchError(
            f"expected point of dimension {dim}, got shape {arr.shape}"
        )
    return arr


class FiniteSumProblem:
    """A finite-sum objective with per-component gradients and constants.

    Immutable after construction; safe for concurrent read-only use.
    """

    def __init__(
        self,
        components: Sequence[ComponentFunction],
        dim: int,
        mu: float,
        x_star: Optional[np.ndarray] = None,
        inf_f: Optional[float] = None,
    ):
        if len(components) < 2:
            raise ValueError("a finite sum needs at least 2 components")
        if mu <= 0:
            raise ValueError("PL constant mu must be positive")
        self.components = tuple(components)
        self.dim = int(dim)
        self.mu = float(mu)
        self.x_star = None if x_star is None else as_point(x_star, dim)
        self.inf_f = None if inf_f is None else float(inf_f)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def smoothness_constants(self) -> np.ndarray:
        return np.array([c.smoothness for c in self.components])

    @property
    def L(self) -> float:
        return float(self.smoothness_constants.mean())

    @property
    def L_max(self) -> float:
        return float(self.smoothness_constants.max())

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        return float(np.mean([c.eval(x) for c in self.components]))

    def component_value(self, i: int, x) -> float:
        x = as_point(x, self.dim)
        return float(self.components[i].eval(x))

    def component_gradient(self, i: int, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return np.asarray(self.components[i].grad(x), dtype=float)

    def component_gradients(self, x) -> np.ndarray:
        """All component gradients stacked into an (n, d) array."""
        x = as_point(x, self.dim)
        return np.stack([np.asarray(c.grad(x), dtype=float) for c in self.components])

    def full_gradient(self, x) -> np.ndarray:
        """Exact arithmetic mean of the component gradients."""
        return self.component_gradients(x).mean(axis=0)

    def gradient_noise_at_optimum(self) -> float:
        """Empirical variance of the component gradients at x*."""
        if self.x_star is None:
            raise UnsupportedQueryError("gradient noise needs a known minimizer x*")
        grads = self.component_gradients(self.x_star)
        centered = grads - grads.mean(axis=0)
        return float(np.mean(np.sum(centered**2, axis=1)))

    def optimality_gap(self, x) -> float:
        """f(x) - inf f, clamped at 0 only for tiny negative roundoff."""
        if self.inf_f is None:
            raise UnsupportedQueryError("optimality gap needs a known inf f")
        gap = self.value(x) - self.inf_f
        if gap < 0:
            if gap >= -GAP_NEGATIVE_TOL:
                return 0.0
            raise NumericalInconsistencyError(
                f"gap {gap} below -{GAP_NEGATIVE_TOL}: inf_f inconsistent"
            )
        return gap


@dataclass(frozen=True)
class _QuadComponent:
    """f_i(x) = a * ||x - b||^2, picklable for process-parallel trials."""

    a: float
    b: np.ndarray

    def eval(self, x: np.ndarray) -> float:
        diff = x - self.b
        return self.a * float(diff @ diff)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * self.a * (x - self.b)


class QuadraticProblem(FiniteSumProblem):
    """Quadratic family f_i(x) = a_i ||x - b_i||^2 with vectorized gradients."""

    def __init__(self, a: np.ndarray, b: np.ndarray):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        components = [
            ComponentFunction(eval=q.eval, grad=q.grad, smoothness=2.0 * q.a)
            for q in (_QuadComponent(ai, bi) for ai, bi in zip(a, b))
        ]
        x_star = (a[:, None] * b).sum(axis=0) / a.sum()
        # Hessian of f is 2*mean(a)*I, so strong convexity (hence PL) holds
        # with mu = 2*mean(a).
        mu = 2.0 * float(a.mean())
        super().__init__(components, dim=b.shape[1], mu=mu, x_star=x_star, inf_f=None)
        self.a = a
        self.b = b
        self.inf_f = self.value(x_star)

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        diffs = x - self.b
        return float(np.mean(self.a * np.sum(diffs**2, axis=1)))

    def component_gradient(self, i: int, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return 2.0 * self.a[i] * (x - self.b[i])

    def component_gradients(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return 2.0 * self.a[:, None] * (x - self.b)


def make_quadratic_family(a, b) -> QuadraticProblem:
    """Build the quadratic family f_i(x) = a_i ||x - b_i||^2.

    b entries may be scalars (1-D problem) or vectors of a common dimension.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("a must be a nonempty 1-D sequence of curvatures")
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    if len(a) != len(b):
        raise ValueError("a and b must have the same length")
    if len(a) < 2:
        raise ValueError("a finite sum needs at least 2 components")
    if np.any(a <= 0):
        raise ValueError("all curvatures a_i must be positive")
    return QuadraticProblem(a, b)
