"""Error norms, conservation-drift tracking, and convergence-rate estimation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import InvariantViolation


def neumaier_sum(values) -> float:
    """Error-free transformation summation (math.fsum).

    Conservation totals are accumulated this way so that 1e-12 drift
    thresholds remain meaningful at 1e5 cells x steps.
    """
    return math.fsum(np.asarray(values, dtype=float).ravel())


def l2_error(field_a, field_b, grid) -> float:
    """(sum (A-B)^2 dx)^(1/2) on matching grids."""
    a = np.asarray(field_a, dtype=float)
    b = np.asarray(field_b, dtype=float)
    if a.shape != b.shape:
        raise InvariantViolation(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sqrt(neumaier_sum((a - b) ** 2) * grid.dx))


def rate_estimate(errors, eps_values) -> float:
    """Least-squares slope of log(error) against log(eps)."""
    errors = np.asarray(errors, dtype=float)
    eps_values = np.asarray(eps_values, dtype=float)
    if errors.size < 3:
        raise InvariantViolation("need >= 3 points for a rate estimate")
    if np.any(errors <= 0) or np.any(eps_values <= 0):
        raise InvariantViolation("rate estimate needs positive errors and eps")
    A = np.vstack([np.log(eps_values), np.ones_like(eps_values)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(errors), rcond=None)
    return float(coef[0])


def drift(series):
    """Max deviation of a series from its initial value.

    Returns (value, mode) where mode is 'relative' normally and 'absolute'
    when the initial value is zero.
    """
    s = np.asarray(series, dtype=float)
    if s.size == 0:
        raise InvariantViolation("empty series")
    dev = np.max(np.abs(s - s[0]))
    if s[0] == 0.0:
        return float(dev), "absolute"
    return float(dev / abs(s[0])), "relative"


@dataclass
class DiagnosticsRecord:
    """One time-series sample of conserved totals and entropy diagnostics."""

    step: int
    t: float
    masses: np.ndarray
    momentum: float
    energy: float
    entropy: float
    extra: dict = field(default_factory=dict)


def records_to_rows(records: list[DiagnosticsRecord], nspec: int):
    header = ["step", "t"] + [f"mass_{i+1}" for i in range(nspec)] + [
        "momentum", "energy", "entropy"]
    extra_keys = sorted({k for r in records for k in r.extra})
    header += extra_keys
    rows = []
    for r in records:
        row = [r.step, f"{r.t:.12g}"] + [f"{m:.17g}" for m in r.masses] + [
            f"{r.momentum:.17g}", f"{r.energy:.17g}", f"{r.entropy:.17g}"]
        row += [f"{r.extra.get(k, float('nan')):.17g}" for k in extra_keys]
        rows.append(row)
    return header, rows


def write_series_csv(path, records: list[DiagnosticsRecord], nspec: int):
    header, rows = records_to_rows(records, nspec)
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(header)
        wr.writerows(rows)


def write_snapshot_csv(path, x, columns: dict[str, np.ndarray]):
    """Field snapshot: x plus named per-cell columns."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["x"] + list(columns.keys()))
        for c in range(len(x)):
            wr.writerow([f"{x[c]:.17g}"] + [f"{col[c]:.17g}" for col in columns.values()])


def read_csv_columns(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        data = [[float(v) for v in row] for row in rd]
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        return {h: np.empty(0) for h in header}
    return {h: arr[:, i] for i, h in enumerate(header)}
