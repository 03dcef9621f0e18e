"""Figure rendering: gap-vs-queries comparison and the exploration-rate sweep.

Output is a pure function of the CSV content and the PlotSpec: fixed style,
fixed color assignment (sorted labels), no timestamps, so images are
byte-for-byte reproducible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reader import BoundCurve, Curve, SchemaError, read_aggregate, read_bounds

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f"]

_P_LABEL = re.compile(r"p(\d*\.?\d+)$")


@dataclass
class PlotSpec:
    aggregate_csv: Path
    output: Path
    bounds_csv: Optional[Path] = None
    y_scale: str = "log"
    algos: Optional[List[str]] = None  # subset filter; None means all

    def __post_init__(self):
        if self.y_scale not in ("log", "linear"):
            raise ValueError(f"y_scale must be 'log' or 'linear', got {self.y_scale!r}")


def _select(curves: Dict[str, Curve], wanted: Optional[List[str]]) -> Dict[str, Curve]:
    if wanted is None:
        return curves
    missing = [a for a in wanted if a not in curves]
    if missing:
        raise SchemaError(f"algo(s) {missing} not present in CSV "
                          f"(available: {sorted(curves)})")
    return {a: curves[a] for a in wanted}


def _new_figure():
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    ax.grid(True, which="both", alpha=0.3, linewidth=0.5)
    return fig, ax


def _finish(fig, ax, spec: PlotSpec, ylabel: str):
    ax.set_xlabel("gradient queries")
    ax.set_ylabel(ylabel)
    ax.set_yscale(spec.y_scale)
    ax.legend(frameon=False)
    fig.tight_layout()
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Software": "sqopt-plots"})
    plt.close(fig)
    return out


def plot_comparison(spec: PlotSpec) -> Path:
    """Mean gap vs total queries, one line per algorithm, +-1 std band.

    With bounds_csv set, matching bound curves are overlaid dashed.
    """
    curves = _select(read_aggregate(spec.aggregate_csv), spec.algos)
    bounds: Dict[str, BoundCurve] = {}
    if spec.bounds_csv is not None:
        bounds = read_bounds(spec.bounds_csv)

    fig, ax = _new_figure()
    floor = 1e-300
    for k, label in enumerate(sorted(curves)):
        c = curves[label]
        color = PALETTE[k % len(PALETTE)]
        mean = np.maximum(c.mean_gap, floor) if spec.y_scale == "log" else c.mean_gap
        ax.plot(c.queries, mean, color=color, linewidth=1.5, label=label)
        lo = np.maximum(c.mean_gap - c.std_gap, floor if spec.y_scale == "log" else -np.inf)
        hi = c.mean_gap + c.std_gap
        ax.fill_between(c.queries, lo, hi, color=color, alpha=0.15, linewidth=0)
        if label in bounds:
            b = bounds[label]
            # bound curves share the iteration axis; map t onto queries
            q = np.interp(b.t, c.t, c.queries)
            ax.plot(q, b.bound_gap, color=color, linewidth=1.0,
                    linestyle="--", label=f"{label} bound")
    return _finish(fig, ax, spec, "mean optimality gap")


def _sweep_order(labels) -> List[str]:
    """Sort p-labeled curves ascending in p; other labels follow, sorted."""
    with_p, without_p = [], []
    for label in labels:
        m = _P_LABEL.search(label)
        if m:
            with_p.append((float(m.group(1)), label))
        else:
            without_p.append(label)
    return [label for _, label in sorted(with_p)] + sorted(without_p)


def plot_p_sweep(spec: PlotSpec) -> Path:
    """Mean gap vs queries, one line per exploration rate p."""
    curves = _select(read_aggregate(spec.aggregate_csv), spec.algos)
    fig, ax = _new_figure()
    floor = 1e-300
    for k, label in enumerate(_sweep_order(curves)):
        c = curves[label]
        mean = np.maximum(c.mean_gap, floor) if spec.y_scale == "log" else c.mean_gap
        ax.plot(c.queries, mean, color=PALETTE[k % len(PALETTE)],
                linewidth=1.5, label=label)
    return _finish(fig, ax, spec, "mean optimality gap")
