"""Experiment configuration: JSON key-value tree with strict validation.

An empty file (or empty object) yields the full default setup: the 7-region
demo graph, 30 robots, horizon 500, cooling rate 0.025, 100 trials, all
three strategies under the REMC planner, with true variances drawn from
(0, 20] scaled by the robot count and means from (-10, 10], fixed across
trials.  Unknown keys are rejected with their path.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .chains import SolverOptions
from .graph import DEMO_EDGES, RegionGraph, validate
from .target import SCHEDULE_KINDS

_STRATEGIES = ("annealed", "direct", "uniform")
_PLANNERS = ("remc", "fmmc", "metropolis_hastings")
_DRAW_MODES = ("fixed", "per_trial")


class ConfigError(ValueError):
    """Malformed or invalid experiment configuration."""


@dataclass(frozen=True)
class GraphSpec:
    n_regions: int = 7
    edges: tuple[tuple[int, int], ...] = DEMO_EDGES
    self_loops: bool = True


@dataclass(frozen=True)
class GroundTruthSpec:
    variance_range: tuple[float, float] = (0.0, 20.0)
    mean_range: tuple[float, float] = (-10.0, 10.0)
    scale_noise_by_robots: bool = True
    draw_mode: str = "fixed"


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphSpec = field(default_factory=GraphSpec)
    n_robots: int = 30
    horizon: int = 500
    alpha: float = 0.025
    schedule: str = "first_order"
    trials: int = 100
    base_seed: int = 0
    strategies: tuple[str, ...] = _STRATEGIES
    planner: str = "remc"
    ground_truth: GroundTruthSpec = field(default_factory=GroundTruthSpec)
    start_region: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)

    def region_graph(self) -> RegionGraph:
        return RegionGraph.from_undirected(
            self.graph.n_regions, self.graph.edges, self.graph.self_loops
        )


def _require_keys(d: dict, allowed: set[str], path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        where = f" under '{path}'" if path else ""
        raise ConfigError(f"unknown config key(s){where}: {', '.join(sorted(unknown))}")


def _pair(value, path: str) -> tuple[float, float]:
    try:
        lo, hi = value
        return (float(lo), float(hi))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{path}' must be a [lo, hi] pair") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a key-value object")
    _require_keys(
        data,
        {
            "graph", "n_robots", "horizon", "alpha", "schedule", "trials",
            "base_seed", "strategies", "planner", "ground_truth",
            "start_region", "solver",
        },
        "",
    )

    gdata = data.get("graph", {})
    _require_keys(gdata, {"n_regions", "edges", "self_loops"}, "graph")
    default_g = GraphSpec()
    edges = gdata.get("edges", default_g.edges)
    graph = GraphSpec(
        n_regions=int(gdata.get("n_regions", default_g.n_regions)),
        edges=tuple((int(a), int(b)) for a, b in edges),
        self_loops=bool(gdata.get("self_loops", default_g.self_loops)),
    )

    tdata = data.get("ground_truth", {})
    _require_keys(
        tdata,
        {"variance_range", "mean_range", "scale_noise_by_robots", "draw_mode"},
        "ground_truth",
    )
    default_t = GroundTruthSpec()
    truth = GroundTruthSpec(
        variance_range=_pair(
            tdata.get("variance_range", default_t.variance_range), "ground_truth.variance_range"
        ),
        mean_range=_pair(
            tdata.get("mean_range", default_t.mean_range), "ground_truth.mean_range"
        ),
        scale_noise_by_robots=bool(
            tdata.get("scale_noise_by_robots", default_t.scale_noise_by_robots)
        ),
        draw_mode=str(tdata.get("draw_mode", default_t.draw_mode)),
    )

    sdata = data.get("solver", {})
    _require_keys(
        sdata,
        {"max_iters", "improve_tol", "improve_window", "feas_tol", "warm_start", "step_scale"},
        "solver",
    )
    default_s = SolverOptions()
    step_scale = sdata.get("step_scale", default_s.step_scale)
    solver = SolverOptions(
        max_iters=int(sdata.get("max_iters", default_s.max_iters)),
        improve_tol=float(sdata.get("improve_tol", default_s.improve_tol)),
        improve_window=int(sdata.get("improve_window", default_s.improve_window)),
        feas_tol=float(sdata.get("feas_tol", default_s.feas_tol)),
        warm_start=bool(sdata.get("warm_start", default_s.warm_start)),
        step_scale=None if step_scale is None else float(step_scale),
    )

    config = ExperimentConfig(
        graph=graph,
        n_robots=int(data.get("n_robots", 30)),
        horizon=int(data.get("horizon", 500)),
        alpha=float(data.get("alpha", 0.025)),
        schedule=str(data.get("schedule", "first_order")),
        trials=int(data.get("trials", 100)),
        base_seed=int(data.get("base_seed", 0)),
        strategies=tuple(data.get("strategies", _STRATEGIES)),
        planner=str(data.get("planner", "remc")),
        ground_truth=truth,
        start_region=int(data.get("start_region", 0)),
        solver=solver,
    )
    validate_config(config)
    return config


def validate_config(config: ExperimentConfig) -> None:
    errors: list[str] = []
    g = config.graph
    if g.n_regions < 1:
        errors.append(f"graph.n_regions must be >= 1, got {g.n_regions}")
    else:
        report = validate(config.region_graph())
        if report.bad_edges:
            errors.append(f"graph.edges contains out-of-range pairs: {report.bad_edges}")
        elif not report.strongly_connected:
            errors.append("graph is not strongly connected")
    if config.n_robots < 1:
        errors.append(f"n_robots must be >= 1, got {config.n_robots}")
    if config.horizon < 1:
        errors.append(f"horizon must be >= 1, got {config.horizon}")
    if not config.alpha > 0:
        errors.append(f"alpha must be positive, got {config.alpha}")
    if config.schedule not in SCHEDULE_KINDS:
        errors.append(f"schedule must be one of {SCHEDULE_KINDS}, got {config.schedule!r}")
    if config.trials < 1:
        errors.append(f"trials must be >= 1, got {config.trials}")
    if config.base_seed < 0:
        errors.append(f"base_seed must be >= 0, got {config.base_seed}")
    if not config.strategies:
        errors.append("strategies must be non-empty")
    for s in config.strategies:
        if s not in _STRATEGIES:
            errors.append(f"unknown strategy {s!r}; expected one of {_STRATEGIES}")
    if config.planner not in _PLANNERS:
        errors.append(f"unknown planner {config.planner!r}; expected one of {_PLANNERS}")
    t = config.ground_truth
    if not t.variance_range[1] > t.variance_range[0]:
        errors.append(f"ground_truth.variance_range must be non-empty, got {t.variance_range}")
    if t.variance_range[0] < 0:
        errors.append("ground_truth.variance_range must not extend below zero")
    if not t.mean_range[1] > t.mean_range[0]:
        errors.append(f"ground_truth.mean_range must be non-empty, got {t.mean_range}")
    if t.draw_mode not in _DRAW_MODES:
        errors.append(f"ground_truth.draw_mode must be one of {_DRAW_MODES}, got {t.draw_mode!r}")
    if not 0 <= config.start_region < max(g.n_regions, 1):
        errors.append(f"start_region {config.start_region} out of range [0, {g.n_regions})")
    s = config.solver
    if s.max_iters < 1 or s.improve_window < 1:
        errors.append("solver iteration counts must be >= 1")
    if s.improve_tol <= 0 or s.feas_tol <= 0:
        errors.append("solver tolerances must be positive")
    if errors:
        raise ConfigError("; ".join(errors))


def config_to_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["graph"]["edges"] = [list(e) for e in config.graph.edges]
    d["ground_truth"]["variance_range"] = list(config.ground_truth.variance_range)
    d["ground_truth"]["mean_range"] = list(config.ground_truth.mean_range)
    d["strategies"] = list(config.strategies)
    return d


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a config file; empty files mean all defaults."""
    text = Path(path).read_text()
    if not text.strip():
        data: dict = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


def default_config() -> ExperimentConfig:
    return ExperimentConfig()
