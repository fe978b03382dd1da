"""Figure construction from bundle tables.

Two figure kinds mirror the entropy-comparison and space-vs-time-average
layouts: median curves with shaded interquartile bands, and per-region
target/visitation trajectories against the oracle allocation.  Everything
plotted comes straight from the tables; nothing is re-simulated.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .tables import read_aggregate, read_trial, read_truth, strategy_labels

STRATEGY_COLORS = {"annealed": "tab:green", "direct": "tab:red", "uniform": "tab:blue"}


@dataclass
class PlotSpec:
    bundle: Path
    kind: str  # "entropy-comparison" | "space-time-average"
    out: Path
    strategies: tuple[str, ...] = ()  # empty = all in the bundle
    trial: int = 0
    y_scale: str = "linear"
    dump: Path | None = None  # write plotted arrays as a delimited table


def _resolve_labels(spec: PlotSpec) -> list[str]:
    available = strategy_labels(spec.bundle)
    if not spec.strategies:
        labels = available
    else:
        labels = []
        for s in spec.strategies:
            match = [lab for lab in available if lab == s or lab.startswith(s + "__")]
            if not match:
                raise ValueError(f"strategy {s!r} not present in bundle (has {available})")
            labels.extend(match)
    if not labels:
        raise ValueError("no strategies selected")
    return labels


def _dump_columns(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    lines = [",".join(names)]
    for r in range(rows):
        lines.append(",".join(f"{columns[n][r]:.12g}" for n in names))
    Path(path).write_text("\n".join(lines) + "\n")


def plot_entropy(spec: PlotSpec) -> Path:
    """Two panels (true and estimated worst-region entropy), one color per
    strategy: solid median, shaded Q1-Q3 band with dashed borders."""
    labels = _resolve_labels(spec)
    aggs = {label: read_aggregate(spec.bundle, label) for label in labels}
    dump_cols: dict[str, np.ndarray] = {}

    fig, axes = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    panels = [("h_true", "true posterior entropy"), ("h_est", "estimated posterior entropy")]
    for ax, (metric, title) in zip(axes, panels):
        for label in labels:
            agg = aggs[label]
            k = agg["k"]
            med = agg[f"{metric}_median"]
            q1 = agg[f"{metric}_q1"]
            q3 = agg[f"{metric}_q3"]
            strategy = label.split("__")[0]
            color = STRATEGY_COLORS.get(strategy)
            ax.plot(k, med, color=color, label=strategy)
            ax.fill_between(k, q1, q3, color=color, alpha=0.2, linewidth=0)
            ax.plot(k, q1, color=color, linestyle="--", linewidth=0.8)
            ax.plot(k, q3, color=color, linestyle="--", linewidth=0.8)
            if not dump_cols:
                dump_cols["k"] = k
            for name, arr in ((f"{label}:{metric}_median", med),
                              (f"{label}:{metric}_q1", q1),
                              (f"{label}:{metric}_q3", q3)):
                dump_cols[name] = arr
        ax.set_ylabel(title)
        if spec.y_scale != "linear":
            ax.set_yscale(spec.y_scale)
        ax.grid(alpha=0.3)
    axes[0].legend()
    axes[1].set_xlabel("step k")
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    if spec.dump:
        _dump_columns(spec.dump, dump_cols)
    return Path(spec.out)


def plot_space_time(spec: PlotSpec) -> Path:
    """Per-region commanded target and pooled visitation curves for one
    trial, with the oracle allocation as dashed horizontal lines."""
    labels = _resolve_labels(spec)
    label = labels[0]
    trial = read_trial(spec.bundle, label, spec.trial)
    truth = read_truth(spec.bundle, spec.trial)
    optimal = truth["variance"] / truth["variance"].sum()
    k = trial["k"]
    n = trial["rho_bar"].shape[1]
    cmap = plt.get_cmap("tab10")
    dump_cols: dict[str, np.ndarray] = {"k": k}

    fig, axes = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for ax, key, title in (
        (axes[0], "rho_bar", "space average (commanded target)"),
        (axes[1], "rho_hat", "time average (pooled visitation)"),
    ):
        for i in range(n):
            color = cmap(i % 10)
            ax.plot(k, trial[key][:, i], color=color, label=f"region {i}")
            ax.axhline(optimal[i], color=color, linestyle="--", linewidth=0.8)
            dump_cols[f"{key}_{i}"] = trial[key][:, i]
        ax.set_ylabel(title)
        if spec.y_scale != "linear":
            ax.set_yscale(spec.y_scale)
        ax.grid(alpha=0.3)
    axes[0].legend(ncol=2, fontsize=8)
    axes[1].set_xlabel("step k")
    fig.suptitle(f"{label}, trial {spec.trial}")
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    if spec.dump:
        for i in range(n):
            dump_cols[f"optimal_{i}"] = np.full(len(k), optimal[i])
        _dump_columns(spec.dump, dump_cols)
    return Path(spec.out)


def render(spec: PlotSpec) -> Path:
    if spec.kind == "entropy-comparison":
        return plot_entropy(spec)
    if spec.kind == "space-time-average":
        return plot_space_time(spec)
    raise ValueError(f"unknown figure kind {spec.kind!r}")
