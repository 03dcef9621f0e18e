"""Exception types shared across the toolkit."""


class DimensionMismatchError(ValueError):
    """Input point has the wrong dimension for the problem."""


class UnsupportedQueryError(RuntimeError):
    """Requested quantity needs problem data that is absent (x*, inf f)."""


class NumericalInconsistencyError(ArithmeticError):
    """A quantity that must be nonnegative came out meaningfully negative."""


class NumericalError(ArithmeticError):
    """NaN or Inf encountered where a finite value is required."""


class UninitializedTableError(RuntimeError):
    """Surrogate gradient table used before initialization."""


class DegenerateInputError(ValueError):
    """Input collection is degenerate (e.g. all values equal)."""


class StepsizeViolationError(ValueError):
    """Stepsize violates the admissibility condition of a bound."""


class InvariantViolationError(ValueError):
    """A structural invariant between constants does not hold."""


class DivergenceError(RuntimeError):
    """Optimality gap exceeded the divergence threshold."""

    def __init__(self, iteration, message=None):
        super().__init__(message or f"divergence detected at iteration {iteration}")
        self.iteration = iteration


class ConfigError(ValueError):
    """Experiment configuration is invalid; carries all violations."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))
