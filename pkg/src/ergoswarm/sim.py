"""Trial execution: N robots on a region graph, sampling and re-planning.

One trial runs the sample/estimate/re-target/re-plan/move loop for a fixed
horizon: every robot samples its current region once per step, the
sequential estimator folds the observations in, the commanded target is
rebuilt from the recovered variances (per strategy), a chain is synthesized
for it, and all robots transition independently.  All randomness derives
from the single trial seed through documented substreams, so a trial is a
pure function of (config, strategy, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import (
    ChainSynthesisError,
    SolverOptions,
    TransitionMatrix,
    _is_aperiodic,
    _is_irreducible,
    fmmc_solve,
    metropolis_hastings,
    remc_solve,
    sample_next,
)
from .config import ExperimentConfig
from .estimation import (
    GroundTruth,
    NigState,
    _update_inplace,
    draw_ground_truth,
    nig_init,
    observe,
    recover_variance,
)
from .target import (
    AnnealingSchedule,
    TargetDistribution,
    beta_at,
    direct_target,
    gibbs_target,
    uniform_target,
)

STRATEGIES = ("annealed", "direct", "uniform")
PLANNERS = ("remc", "fmmc", "metropolis_hastings")

# Substream identifiers for the seed-splitting scheme (documented interface):
# ground truth uses spawn_key (0,), robot a uses spawn_key (1, a).
STREAM_GROUND_TRUTH = 0
STREAM_ROBOT = 1


def substream(seed: int, *path: int) -> np.random.Generator:
    """Deterministic child generator for (seed, path...)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=path))


@dataclass(frozen=True)
class StrategyKind:
    """Target-building strategy plus the chain planner that tracks it."""

    strategy: str
    planner: str = "remc"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.planner not in PLANNERS:
            raise ValueError(f"unknown planner {self.planner!r}; expected one of {PLANNERS}")

    @property
    def label(self) -> str:
        return f"{self.strategy}__{self.planner}"


@dataclass
class SwarmState:
    """Robot positions (region index per robot) at time step ``step``."""

    positions: np.ndarray
    step: int


@dataclass
class TrialMetrics:
    """Per-step records of one trial."""

    strategy: StrategyKind
    seed: int
    h_true: np.ndarray          # (K,) worst-region true posterior entropy
    h_est: np.ndarray           # (K,) worst-region estimated posterior entropy
    rho_bar: np.ndarray         # (K, n) commanded target per step
    rho_hat: np.ndarray         # (K, n) pooled empirical visitation per step
    visits: np.ndarray          # (K, n) cumulative per-region sample counts
    positions: np.ndarray       # (K+1, N) robot positions (row 0 = start)

    @property
    def horizon(self) -> int:
        return len(self.h_true)

    @property
    def n_regions(self) -> int:
        return self.rho_bar.shape[1]


@dataclass
class AggregateMetrics:
    """Across-trial quartiles of the entropy curves, per step."""

    h_true_median: np.ndarray
    h_true_q1: np.ndarray
    h_true_q3: np.ndarray
    h_est_median: np.ndarray
    h_est_q1: np.ndarray
    h_est_q3: np.ndarray
    gap_median: np.ndarray      # quartiles of per-trial (h_true - h_est)
    gap_q1: np.ndarray
    gap_q3: np.ndarray
    n_trials: int
    quantile_rule: str = "linear"


def true_max_entropy(truth: GroundTruth, visits: np.ndarray) -> float:
    """max_i ln(sigma2_i / visits_i), visit counts floored at 1."""
    v = np.maximum(np.asarray(visits, dtype=float), 1.0)
    return float(np.max(np.log(truth.sigma2 / v)))


def estimated_max_entropy(state: NigState, visits: np.ndarray) -> float:
    """Same as :func:`true_max_entropy` with the recovered variance estimates."""
    v = np.maximum(np.asarray(visits, dtype=float), 1.0)
    return float(np.max(np.log(recover_variance(state) / v)))


def time_average(position_history: np.ndarray, n_regions: int) -> TargetDistribution:
    """Pooled empirical visitation frequency over all robots and steps."""
    hist = np.asarray(position_history)
    if hist.size == 0:
        raise ValueError("empty position history")
    counts = np.bincount(hist.reshape(-1), minlength=n_regions).astype(float)
    return TargetDistribution(rho=counts / counts.sum())


def ground_truth_for(config: ExperimentConfig, trial_seed: int) -> GroundTruth:
    """Draw the trial's ground truth per the configured draw mode."""
    gt = config.ground_truth
    seed = config.base_seed if gt.draw_mode == "fixed" else trial_seed
    rng = substream(seed, STREAM_GROUND_TRUTH)
    scale = float(config.n_robots) if gt.scale_noise_by_robots else 1.0
    return draw_ground_truth(
        config.graph.n_regions,
        rng,
        variance_range=gt.variance_range,
        mean_range=gt.mean_range,
        noise_scale=scale,
    )


def _commanded_target(
    strategy: str,
    sigma2_hat: np.ndarray,
    schedule: AnnealingSchedule,
    k: int,
    n: int,
) -> TargetDistribution:
    if strategy == "uniform":
        return uniform_target(n)
    if strategy == "direct":
        return direct_target(sigma2_hat)
    return gibbs_target(sigma2_hat, beta_at(schedule, k))


def _synthesize(
    planner: str,
    graph,
    target: TargetDistribution,
    options: SolverOptions,
    warm: TransitionMatrix | None,
) -> TransitionMatrix:
    if planner == "metropolis_hastings":
        return metropolis_hastings(graph, target)
    solve = remc_solve if planner == "remc" else fmmc_solve
    tm, _ = solve(graph, target, options, warm_start=warm)
    return tm


def run_trial(config: ExperimentConfig, strategy: StrategyKind, seed: int) -> TrialMetrics:
    """Execute one seeded trial of the given strategy/planner pair."""
    graph = config.region_graph()
    n = graph.n_regions
    N = config.n_robots
    K = config.horizon
    truth = ground_truth_for(config, seed)
    schedule = AnnealingSchedule(alpha=config.alpha, kind=config.schedule)
    options = config.solver

    robot_rngs = [substream(seed, STREAM_ROBOT, a) for a in range(N)]
    state = nig_init(n)
    swarm = SwarmState(positions=np.full(N, config.start_region, dtype=int), step=0)
    visits = np.zeros(n, dtype=int)

    h_true = np.empty(K)
    h_est = np.empty(K)
    rho_bar = np.empty((K, n))
    rho_hat = np.empty((K, n))
    visits_hist = np.empty((K, n), dtype=int)
    pos_hist = np.empty((K + 1, N), dtype=int)
    pos_hist[0] = swarm.positions

    warm: TransitionMatrix | None = None
    for k in range(K):
        for a in range(N):
            r = int(swarm.positions[a])
            z = observe(truth, r, robot_rngs[a])
            _update_inplace(state.nu, state.mu, state.b, r, z)
            visits[r] += 1
        sigma2_hat = recover_variance(state)

        target = _commanded_target(strategy.strategy, sigma2_hat, schedule, k, n)
        h_true[k] = true_max_entropy(truth, visits)
        h_est[k] = estimated_max_entropy(state, state.nu)
        rho_bar[k] = target.rho
        rho_hat[k] = visits / (N * (k + 1))
        visits_hist[k] = visits

        try:
            tm = _synthesize(strategy.planner, graph, target, options, warm)
        except ChainSynthesisError as exc:
            raise ChainSynthesisError(f"step {k}: {exc}") from exc
        if not (_is_irreducible(tm.P) and _is_aperiodic(tm.P)):
            raise ChainSynthesisError(f"step {k}: synthesized chain is not ergodic")
        if options.warm_start and strategy.planner != "metropolis_hastings":
            warm = tm

        for a in range(N):
            swarm.positions[a] = sample_next(tm, int(swarm.positions[a]), robot_rngs[a])
        swarm.step = k + 1
        pos_hist[k + 1] = swarm.positions

    return TrialMetrics(
        strategy=strategy,
        seed=seed,
        h_true=h_true,
        h_est=h_est,
        rho_bar=rho_bar,
        rho_hat=rho_hat,
        visits=visits_hist,
        positions=pos_hist,
    )


def aggregate_trials(trials: list[TrialMetrics]) -> AggregateMetrics:
    """Per-step quartiles across trials (linear-interpolation quantiles)."""
    if not trials:
        raise ValueError("need at least one trial")
    horizons = {t.horizon for t in trials}
    if len(horizons) != 1:
        raise ValueError(f"mismatched trial horizons: {sorted(horizons)}")
    ht = np.stack([t.h_true for t in trials])
    he = np.stack([t.h_est for t in trials])
    gap = ht - he
    q = lambda arr: np.quantile(arr, [0.25, 0.5, 0.75], axis=0, method="linear")
    qt, qe, qg = q(ht), q(he), q(gap)
    return AggregateMetrics(
        h_true_median=qt[1], h_true_q1=qt[0], h_true_q3=qt[2],
        h_est_median=qe[1], h_est_q1=qe[0], h_est_q3=qe[2],
        gap_median=qg[1], gap_q1=qg[0], gap_q3=qg[2],
        n_trials=len(trials),
    )


def ensemble_visit_frequency(
    chain: TransitionMatrix,
    n_robots: int,
    n_steps: int,
    start: int | np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Pooled visitation frequency of n_robots walking a fixed chain.

    Counts positions at sampling time (steps 0..n_steps-1), matching the
    trial runner's sample-on-arrival accounting.  Vectorized across robots;
    used for ergodic-convergence diagnostics.
    """
    P = chain.P
    n = P.shape[0]
    positions = np.full(n_robots, start, dtype=int) if np.isscalar(start) else np.asarray(start).copy()
    cdf = np.cumsum(P, axis=0)
    counts = np.zeros(n)
    for _ in range(n_steps):
        counts += np.bincount(positions, minlength=n)
        u = rng.random(n_robots)
        positions = np.minimum((cdf[:, positions] < u[None, :]).sum(axis=0), n - 1)
    return counts / (n_robots * n_steps)
