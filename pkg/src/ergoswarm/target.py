"""Target visitation distributions over regions.

The annealed target is a Gibbs measure whose energy is the negative sample
entropy of each region, which reduces to weights ``(sigma2_hat)**beta``:
uniform at beta = 0, proportional-to-variance at beta = 1, and a delta on
the noisiest region as beta grows.  Evaluation is done in log-space so
large beta and extreme variances do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCHEDULE_KINDS = ("first_order", "tanh")


@dataclass(frozen=True)
class TargetDistribution:
    """Per-region probability vector; entries >= 0 and summing to 1."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        object.__setattr__(self, "rho", rho)
        if rho.ndim != 1 or rho.size == 0:
            raise ValueError("rho must be a non-empty vector")
        if np.any(rho < 0):
            raise ValueError("rho entries must be nonnegative")
        if abs(rho.sum() - 1.0) > 1e-12:
            raise ValueError(f"rho must sum to 1, got {rho.sum()!r}")

    @property
    def n_regions(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class AnnealingSchedule:
    """Cooling schedule beta(k); first-order step response by default."""

    alpha: float
    kind: str = "first_order"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"cooling rate must be positive, got {self.alpha}")
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")


def beta_at(schedule: AnnealingSchedule, k: int) -> float:
    """Coldness at step k: 1 - exp(-alpha*k), or tanh(alpha*k)."""
    if k < 0:
        raise ValueError(f"step index must be >= 0, got {k}")
    if schedule.kind == "tanh":
        return math.tanh(schedule.alpha * k)
    return 1.0 - math.exp(-schedule.alpha * k)


def gibbs_target(sigma2_hat: np.ndarray, beta: float) -> TargetDistribution:
    """rho_i proportional to (sigma2_hat_i)**beta, computed in log-space."""
    s2 = np.asarray(sigma2_hat, dtype=float)
    if np.any(s2 <= 0) or not np.all(np.isfinite(s2)):
        raise ValueError("variance estimates must be finite and strictly positive")
    if beta < 0:
        raise ValueError(f"coldness must be >= 0, got {beta}")
    logw = beta * np.log(s2)
    logw -= logw.max()
    w = np.exp(logw)
    return TargetDistribution(rho=w / w.sum())


def uniform_target(n: int) -> TargetDistribution:
    """All regions weighted 1/n."""
    if n < 1:
        raise ValueError(f"need at least one region, got n={n}")
    return TargetDistribution(rho=np.full(n, 1.0 / n))


def direct_target(sigma2_hat: np.ndarray) -> TargetDistribution:
    """Proportional to the current variance estimates (beta fixed at 1)."""
    return gibbs_target(sigma2_hat, 1.0)


def optimal_target(sigma2_true: np.ndarray) -> TargetDistribution:
    """Oracle distribution proportional to the true variances.

    Allocating a sampling budget this way equalizes the posterior variance
    sigma2_i / nu_i across regions, which is what minimizes the worst one.
    """
    return gibbs_target(sigma2_true, 1.0)
