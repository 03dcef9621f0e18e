"""Finite-sum stochastic optimization with strategic gradient querying."""

from .problems import (
    ComponentFunction,
    FiniteSumProblem,
    QuadraticProblem,
    make_quadratic_family,
)
from .querying import (
    EIBreakdown,
    SurrogateTable,
    error_radius,
    expected_improvement,
    select_oracle,
    select_ucb,
    select_uniform,
    surrogate_expected_improvement,
)
from .optimizers import (
    AlgoSpec,
    Trajectory,
    run_many,
    run_ogq,
    run_saga,
    run_sgd,
    run_sgq,
    run_svrg,
)
from .analysis import (
    BoundParams,
    ConstantEstimate,
    bound_ogq,
    bound_sgd,
    bound_sgq,
    check_ei_variance_bound,
    check_variance_transfer,
    estimate_C1_C2,
    estimate_Delta,
    monte_carlo_tilde_c,
    stepsize_admissible,
    tilde_c,
    tilde_c_supremum,
)
from .harness import (
    AGGREGATE_HEADER,
    AggregateCurve,
    ExperimentConfig,
    ExperimentResult,
    aggregate,
    load_config,
    recorded_steps,
    run_experiment,
    write_bounds_csv,
    write_csv,
    write_raw_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
