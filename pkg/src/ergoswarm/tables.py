"""Plain-text delimited tables emitted by the experiment runner.

All tables are comma-separated with a single header line naming the
columns; floats are written with 12 significant digits.  These formats are
the stable interface consumed by the plotting component and by spreadsheet
tools.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .estimation import GroundTruth
from .sim import AggregateMetrics, TrialMetrics


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_trial_table(path: Path, metrics: TrialMetrics, trial_index: int) -> None:
    n = metrics.n_regions
    cols = (
        ["k", "strategy", "planner", "trial", "h_true", "h_est"]
        + [f"rho_bar_{i}" for i in range(n)]
        + [f"rho_hat_{i}" for i in range(n)]
    )
    lines = [",".join(cols)]
    for k in range(metrics.horizon):
        row = [
            str(k),
            metrics.strategy.strategy,
            metrics.strategy.planner,
            str(trial_index),
            _fmt(metrics.h_true[k]),
            _fmt(metrics.h_est[k]),
        ]
        row += [_fmt(v) for v in metrics.rho_bar[k]]
        row += [_fmt(v) for v in metrics.rho_hat[k]]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def read_delimited(path: Path) -> dict[str, list[str]]:
    """Parse a header-plus-rows table into per-column string lists."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty table")
    header = lines[0].split(",")
    columns: dict[str, list[str]] = {h: [] for h in header}
    if len(columns) != len(header):
        raise ValueError(f"{path}: duplicate column names in header")
    for ln_no, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError(
                f"{path}: line {ln_no} has {len(cells)} cells, expected {len(header)}"
            )
        for h, c in zip(header, cells):
            columns[h].append(c)
    return columns


def read_float_column(columns: dict[str, list[str]], name: str, path: Path) -> np.ndarray:
    if name not in columns:
        raise ValueError(f"{path}: missing column {name!r}")
    try:
        return np.array([float(v) for v in columns[name]])
    except ValueError as exc:
        raise ValueError(f"{path}: column {name!r} has a non-numeric cell: {exc}") from exc


def write_aggregate_table(path: Path, agg: AggregateMetrics) -> None:
    cols = [
        "k",
        "h_true_median", "h_true_q1", "h_true_q3",
        "h_est_median", "h_est_q1", "h_est_q3",
        "gap_median", "gap_q1", "gap_q3",
    ]
    lines = [",".join(cols)]
    for k in range(len(agg.h_true_median)):
        lines.append(
            ",".join(
                [str(k)]
                + [
                    _fmt(arr[k])
                    for arr in (
                        agg.h_true_median, agg.h_true_q1, agg.h_true_q3,
                        agg.h_est_median, agg.h_est_q1, agg.h_est_q3,
                        agg.gap_median, agg.gap_q1, agg.gap_q3,
                    )
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")


def write_truth_table(path: Path, truth: GroundTruth) -> None:
    lines = ["region,mean,variance"]
    for i in range(truth.n_regions):
        lines.append(f"{i},{_fmt(truth.x[i])},{_fmt(truth.sigma2[i])}")
    path.write_text("\n".join(lines) + "\n")
