"""Readers for the harness CSV schemas.

Only the documented column layouts are consumed:
  aggregate: algo,t,queries,mean_gap,std_gap,n_trials
  bounds:    algo,t,bound_gap,excluded_terms_note
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np

AGGREGATE_COLUMNS = ["algo", "t", "queries", "mean_gap", "std_gap", "n_trials"]
BOUNDS_COLUMNS = ["algo", "t", "bound_gap", "excluded_terms_note"]


class SchemaError(ValueError):
    """A CSV does not match the documented column layout."""


@dataclass
class Curve:
    algo: str
    t: np.ndarray
    queries: np.ndarray
    mean_gap: np.ndarray
    std_gap: np.ndarray
    n_trials: int


@dataclass
class BoundCurve:
    algo: str
    t: np.ndarray
    bound_gap: np.ndarray
    note: str


def _check_header(header: List[str], expected: List[str], path) -> None:
    missing = [c for c in expected if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}")
    if header != expected:
        raise SchemaError(
            f"{path}: columns {header} do not match expected {expected}"
        )


def read_aggregate(path) -> Dict[str, Curve]:
    """Parse an aggregate CSV into per-algorithm curves, in file order."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    _check_header(rows[0], AGGREGATE_COLUMNS, path)
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows")
    grouped: Dict[str, List[List[str]]] = {}
    for row in rows[1:]:
        if len(row) != len(AGGREGATE_COLUMNS):
            raise SchemaError(f"{path}: malformed row {row}")
        grouped.setdefault(row[0], []).append(row)
    curves = {}
    for algo, group in grouped.items():
        curves[algo] = Curve(
            algo=algo,
            t=np.array([int(r[1]) for r in group]),
            queries=np.array([int(r[2]) for r in group]),
            mean_gap=np.array([float(r[3]) for r in group]),
            std_gap=np.array([float(r[4]) for r in group]),
            n_trials=int(group[0][5]),
        )
    return curves


def read_bounds(path) -> Dict[str, BoundCurve]:
    """Parse a bound-curve CSV."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    _check_header(rows[0], BOUNDS_COLUMNS, path)
    grouped: Dict[str, List[List[str]]] = {}
    for row in rows[1:]:
        if len(row) != len(BOUNDS_COLUMNS):
            raise SchemaError(f"{path}: malformed row {row}")
        grouped.setdefault(row[0], []).append(row)
    curves = {}
    for algo, group in grouped.items():
        curves[algo] = BoundCurve(
            algo=algo,
            t=np.array([int(r[1]) for r in group]),
            bound_gap=np.array([float(r[2]) for r in group]),
            note=group[0][3],
        )
    return curves
