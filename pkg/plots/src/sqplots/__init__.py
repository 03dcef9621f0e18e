"""Gap-vs-queries figure rendering from harness CSVs."""

from .reader import BoundCurve, Curve, SchemaError, read_aggregate, read_bounds
from .render import PlotSpec, plot_comparison, plot_p_sweep

__all__ = [
    "BoundCurve",
    "Curve",
    "SchemaError",
    "read_aggregate",
    "read_bounds",
    "PlotSpec",
    "plot_comparison",
    "plot_p_sweep",
]
__version__ = "0.1.0"
