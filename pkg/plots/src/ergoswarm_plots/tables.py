"""Readers for the runner's results-bundle files.

The bundle layout and CSV formats are the documented interface of the
experiment runner; this package parses them directly and never imports the
simulation code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def load_manifest(bundle: Path) -> dict:
    path = Path(bundle) / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"{bundle}: not a results bundle (no manifest.json)")
    return json.loads(path.read_text())


def read_table(path: Path) -> dict[str, list[str]]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty table")
    header = lines[0].split(",")
    columns: dict[str, list[str]] = {h: [] for h in header}
    for ln_no, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError(f"{path}: line {ln_no} has {len(cells)} cells, expected {len(header)}")
        for h, c in zip(header, cells):
            columns[h].append(c)
    return columns


def floats(columns: dict[str, list[str]], name: str, path: Path) -> np.ndarray:
    if name not in columns:
        raise ValueError(f"{path}: missing column {name!r}")
    return np.array([float(v) for v in columns[name]])


def strategy_labels(bundle: Path) -> list[str]:
    return list(load_manifest(bundle)["strategies"])


def read_aggregate(bundle: Path, label: str) -> dict[str, np.ndarray]:
    path = Path(bundle) / label / "aggregate.csv"
    if not path.exists():
        raise FileNotFoundError(f"missing aggregate table: {path}")
    cols = read_table(path)
    return {name: floats(cols, name, path) for name in cols}


def read_trial(bundle: Path, label: str, trial: int) -> dict[str, np.ndarray]:
    path = Path(bundle) / label / f"trial_{trial:04d}.csv"
    if not path.exists():
        raise FileNotFoundError(f"missing trial table: {path}")
    cols = read_table(path)
    n_regions = sum(1 for name in cols if name.startswith("rho_bar_"))
    if n_regions == 0:
        raise ValueError(f"{path}: no per-region rho_bar columns")
    out = {"k": floats(cols, "k", path)}
    for prefix in ("rho_bar", "rho_hat"):
        out[prefix] = np.stack(
            [floats(cols, f"{prefix}_{i}", path) for i in range(n_regions)], axis=1
        )
    return out


def read_truth(bundle: Path, trial: int) -> dict[str, np.ndarray]:
    """Per-trial truth when present, else the fixed-mode shared truth."""
    bundle = Path(bundle)
    per_trial = bundle / "truths" / f"truth_{trial:04d}.csv"
    path = per_trial if per_trial.exists() else bundle / "ground_truth.csv"
    if not path.exists():
        raise FileNotFoundError(f"{bundle}: no ground-truth table")
    cols = read_table(path)
    return {
        "mean": floats(cols, "mean", path),
        "variance": floats(cols, "variance", path),
    }
