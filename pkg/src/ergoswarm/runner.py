"""Batch experiment runner: seeded trials, tables, manifest, and summaries.

A results bundle is a directory:

    manifest.json                         run metadata + file digests
    config.json                           the exact configuration used
    ground_truth.csv                      fixed-mode truth (default), or
    truths/truth_XXXX.csv                 per-trial truths
    <strategy>__<planner>/trial_XXXX.csv  per-trial metric tables
    <strategy>__<planner>/aggregate.csv   across-trial quartile curves

Trials are seeded as base_seed + trial_index and may run in parallel;
outputs are written after a deterministic sort, so bundles are
byte-identical regardless of worker count.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_to_dict
from .sim import (
    StrategyKind,
    TrialMetrics,
    aggregate_trials,
    ground_truth_for,
    run_trial,
)
from .tables import (
    read_delimited,
    read_float_column,
    write_aggregate_table,
    write_trial_table,
    write_truth_table,
)

TRANSIENT_WINDOW = (20, 200)


class RunError(RuntimeError):
    """A trial failed; carries the (strategy, seed, step) context."""


def trial_seed(base_seed: int, index: int) -> int:
    return base_seed + index


def _trial_task(args: tuple[ExperimentConfig, StrategyKind, int, int]):
    config, kind, index, seed = args
    try:
        return kind.label, index, run_trial(config, kind, seed)
    except Exception as exc:  # report through the result channel for exact attribution
        return kind.label, index, exc


def run_experiment(config: ExperimentConfig, outdir: str | Path, jobs: int = 1) -> Path:
    """Run every (strategy, trial) pair and write the results bundle."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    kinds = [StrategyKind(s, config.planner) for s in config.strategies]
    seeds = [trial_seed(config.base_seed, i) for i in range(config.trials)]
    tasks = [(config, kind, i, seeds[i]) for kind in kinds for i in range(config.trials)]

    results: dict[tuple[str, int], TrialMetrics] = {}
    failure: tuple[str, int, str] | None = None
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(_trial_task, tasks, chunksize=1)
            for label, index, res in outcomes:
                if isinstance(res, Exception):
                    failure = (label, index, str(res))
                    break
                results[(label, index)] = res
    else:
        for task in tasks:
            label, index, res = _trial_task(task)
            if isinstance(res, Exception):
                failure = (label, index, str(res))
                break
            results[(label, index)] = res
    if failure is not None:
        _write_manifest(out, config, seeds, started, files={}, complete=False, failure=failure)
        raise RunError(
            f"trial failed (strategy {failure[0]}, seed {config.base_seed + failure[1]}): {failure[2]}"
        )

    files: dict[str, str] = {}

    def _record(relpath: str) -> None:
        files[relpath] = hashlib.sha256((out / relpath).read_bytes()).hexdigest()

    config_path = out / "config.json"
    config_path.write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
    _record("config.json")

    if config.ground_truth.draw_mode == "fixed":
        write_truth_table(out / "ground_truth.csv", ground_truth_for(config, seeds[0]))
        _record("ground_truth.csv")
    else:
        (out / "truths").mkdir(exist_ok=True)
        for i, seed in enumerate(seeds):
            rel = f"truths/truth_{i:04d}.csv"
            write_truth_table(out / rel, ground_truth_for(config, seed))
            _record(rel)

    for kind in kinds:
        subdir = out / kind.label
        subdir.mkdir(exist_ok=True)
        trials = [results[(kind.label, i)] for i in range(config.trials)]
        for i, metrics in enumerate(trials):
            rel = f"{kind.label}/trial_{i:04d}.csv"
            write_trial_table(out / rel, metrics, i)
            _record(rel)
        rel = f"{kind.label}/aggregate.csv"
        write_aggregate_table(out / rel, aggregate_trials(trials))
        _record(rel)

    _write_manifest(out, config, seeds, started, files, complete=True, failure=None)
    return out


def _write_manifest(
    out: Path,
    config: ExperimentConfig,
    seeds: list[int],
    started: float,
    files: dict[str, str],
    complete: bool,
    failure: tuple[str, int, str] | None,
) -> None:
    manifest = {
        "version": __version__,
        "complete": complete,
        "config": config_to_dict(config),
        "strategies": [f"{s}__{config.planner}" for s in config.strategies],
        "trial_seeds": seeds,
        "quantile_rule": "linear",
        "wall_clock_seconds": round(time.time() - started, 3),
        "files": files,
    }
    if failure is not None:
        manifest["failure"] = {"strategy": failure[0], "trial": failure[1], "error": failure[2]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_manifest(bundle: str | Path) -> dict:
    path = Path(bundle) / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"{bundle}: not a results bundle (no manifest.json)")
    return json.loads(path.read_text())


def verify_bundle(bundle: str | Path) -> list[str]:
    """Recompute file digests against the manifest; returns mismatches."""
    out = Path(bundle)
    manifest = load_manifest(out)
    problems = []
    for rel, digest in manifest.get("files", {}).items():
        p = out / rel
        if not p.exists():
            problems.append(f"missing file: {rel}")
        elif hashlib.sha256(p.read_bytes()).hexdigest() != digest:
            problems.append(f"digest mismatch: {rel}")
    return problems


def read_aggregate(bundle: Path, label: str) -> dict[str, np.ndarray]:
    path = Path(bundle) / label / "aggregate.csv"
    if not path.exists():
        raise FileNotFoundError(f"missing aggregate table: {path}")
    cols = read_delimited(path)
    return {name: read_float_column(cols, name, path) for name in cols}


def _window_slice(horizon: int) -> slice:
    lo, hi = TRANSIENT_WINDOW
    return slice(min(lo, horizon - 1), min(hi + 1, horizon))


def summarize(bundle: str | Path) -> str:
    """Text report: final/transient medians and pairwise ordering verdicts."""
    out = Path(bundle)
    manifest = load_manifest(out)
    if not manifest.get("complete", False):
        raise RunError(f"{out}: bundle is marked incomplete")
    labels = manifest["strategies"]
    aggs = {label: read_aggregate(out, label) for label in labels}

    lines = []
    lines.append(f"bundle: {out}")
    lines.append(f"trials: {len(manifest['trial_seeds'])}   planner: {manifest['config']['planner']}")
    lines.append("")
    lines.append(f"{'strategy':<28}{'final median h':>16}{'transient median h':>20}")
    horizon = None
    for label, agg in aggs.items():
        h = agg["h_true_median"]
        horizon = len(h)
        win = _window_slice(horizon)
        lines.append(f"{label:<28}{h[-1]:>16.4f}{float(np.mean(h[win])):>20.4f}")
    lines.append("")

    def _label(strategy: str) -> str | None:
        for label in labels:
            if label.startswith(strategy + "__"):
                return label
        return None

    ann, direct, uni = _label("annealed"), _label("direct"), _label("uniform")
    win = _window_slice(horizon)
    if ann and direct:
        ha = aggs[ann]["h_true_median"][win]
        hd = aggs[direct]["h_true_median"][win]
        frac = float(np.mean(ha <= hd))
        lines.append(
            f"annealed <= direct on transient window (fraction {frac:.2f} of steps): "
            + ("PASS" if frac > 0.8 else "FAIL")
        )
        gap_a = float(np.mean(aggs[ann]["gap_median"][win]))
        gap_d = float(np.mean(aggs[direct]["gap_median"][win]))
        lines.append(
            f"direct overconfidence gap {gap_d:.4f} > annealed {gap_a:.4f}: "
            + ("PASS" if gap_d > gap_a else "FAIL")
        )
        iqr_a = float(np.mean((aggs[ann]["h_true_q3"] - aggs[ann]["h_true_q1"])[win]))
        iqr_d = float(np.mean((aggs[direct]["h_true_q3"] - aggs[direct]["h_true_q1"])[win]))
        lines.append(
            f"direct IQR width {iqr_d:.4f} > annealed {iqr_a:.4f}: "
            + ("PASS" if iqr_d > iqr_a else "FAIL")
        )
    if ann and uni:
        fa = float(aggs[ann]["h_true_median"][-1])
        fu = float(aggs[uni]["h_true_median"][-1])
        lines.append(
            f"annealed < uniform at final step ({fa:.4f} vs {fu:.4f}): "
            + ("PASS" if fa < fu else "FAIL")
        )
    return "\n".join(lines) + "\n"
