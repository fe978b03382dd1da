"""Annealed ergodic multi-robot information acquisition on region graphs."""

__version__ = "0.1.0"

from .chains import (
    ChainDiagnostics,
    ChainSynthesisError,
    SolverOptions,
    TransitionMatrix,
    fmmc_solve,
    metropolis_hastings,
    remc_solve,
    sample_next,
    stationary_distribution,
    validate_chain,
)
from .config import ConfigError, ExperimentConfig, default_config, load_config, save_config
from .estimation import (
    GroundTruth,
    NigState,
    batch_estimates,
    draw_ground_truth,
    nig_init,
    nig_update,
    observe,
    recover_variance,
)
from .graph import RegionGraph, demo_graph, validate
from .sim import (
    StrategyKind,
    TrialMetrics,
    aggregate_trials,
    estimated_max_entropy,
    run_trial,
    time_average,
    true_max_entropy,
)
from .target import (
    AnnealingSchedule,
    TargetDistribution,
    beta_at,
    direct_target,
    gibbs_target,
    optimal_target,
    uniform_target,
)
