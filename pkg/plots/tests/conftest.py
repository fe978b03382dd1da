from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest


def run_primary_cli(*args: str) -> subprocess.CompletedProcess:
    """Invoke the experiment runner through its public CLI."""
    return subprocess.run(
        [sys.executable, "-m", "ergoswarm.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def bundle(tmp_path_factory) -> Path:
    """A small completed bundle: demo graph, 3 trials, all strategies.

    The M-H planner keeps this fast; horizon 300 lets the annealed target
    essentially finish cooling (beta > 0.999).
    """
    cfg = {
        "trials": 3,
        "horizon": 300,
        "planner": "metropolis_hastings",
    }
    cfg_path = tmp_path_factory.mktemp("cfg") / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path_factory.mktemp("bundle") / "run"
    proc = run_primary_cli("run", str(cfg_path), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def single_region_bundle(tmp_path_factory) -> Path:
    cfg = {
        "graph": {"n_regions": 1, "edges": []},
        "n_robots": 2,
        "trials": 1,
        "horizon": 5,
        "strategies": ["annealed"],
        "planner": "metropolis_hastings",
    }
    cfg_path = tmp_path_factory.mktemp("cfg1") / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path_factory.mktemp("bundle1") / "run"
    proc = run_primary_cli("run", str(cfg_path), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    return out
