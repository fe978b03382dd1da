"""Sequential Bayesian mean/variance estimation per region.

The online estimator keeps a normal-inverse-gamma parameterization
``(nu, mu, b)`` per region, updated one observation at a time:

    b  += 0.5 * nu/(nu+1) * (z - mu)**2
    mu  = (nu*mu + z) / (nu + 1)
    nu += 1

and recovers the noise-variance estimate as ``2*b*(nu+1)/nu**2``.  The
residual term is squared; an unsquared residual could drive ``b`` negative,
which the conjugate update never does.

``batch_estimates`` is the offline counterpart (plain sample mean and
Bessel-corrected sample variance), used as a test oracle only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# recover_variance of the uninformed init state (nu=1, b=1): 2*1*(1+1)/1**2
UNINFORMED_VARIANCE = 4.0


@dataclass
class GroundTruth:
    """Oracle per-region true means and noise variances, hidden from planners."""

    x: np.ndarray
    sigma2: np.ndarray

    @property
    def n_regions(self) -> int:
        return len(self.x)


@dataclass
class NigState:
    """Per-region sequential-estimator parameters (nu, mu, b)."""

    nu: np.ndarray
    mu: np.ndarray
    b: np.ndarray

    @property
    def n_regions(self) -> int:
        return len(self.nu)

    def copy(self) -> "NigState":
        return NigState(self.nu.copy(), self.mu.copy(), self.b.copy())


def nig_init(n: int) -> NigState:
    """Uninformed prior: nu = ones, b = ones, mu = zeros."""
    if n < 1:
        raise ValueError(f"need at least one region, got n={n}")
    return NigState(nu=np.ones(n), mu=np.zeros(n), b=np.ones(n))


def _update_inplace(nu: np.ndarray, mu: np.ndarray, b: np.ndarray, region: int, z: float) -> None:
    # Order matters: b uses the pre-update mu and nu.
    v = nu[region]
    m = mu[region]
    b[region] += 0.5 * (v / (v + 1.0)) * (z - m) ** 2
    mu[region] = (v * m + z) / (v + 1.0)
    nu[region] = v + 1.0


def nig_update(state: NigState, region: int, z: float) -> NigState:
    """Fold one observation from ``region`` into a copy of ``state``."""
    if not 0 <= region < state.n_regions:
        raise IndexError(f"region {region} out of range [0, {state.n_regions})")
    if not math.isfinite(z):
        raise ValueError(f"non-finite observation {z!r}")
    out = state.copy()
    _update_inplace(out.nu, out.mu, out.b, region, float(z))
    return out


def recover_variance(state: NigState) -> np.ndarray:
    """Per-region variance estimate 2*b*(nu+1)/nu**2, strictly positive."""
    return 2.0 * state.b * (state.nu + 1.0) / state.nu**2


def batch_estimates(samples: list[list[float]]) -> tuple[np.ndarray, np.ndarray]:
    """Offline sample mean and Bessel-corrected sample variance per region.

    Regions with fewer than two samples report the uninformed defaults
    (mean 0 with no samples, variance ``UNINFORMED_VARIANCE``).  Test oracle
    only; the true region mean is unknown to robots, so the sample mean
    stands in for it.
    """
    if not samples:
        raise ValueError("empty region list")
    means = np.zeros(len(samples))
    variances = np.full(len(samples), UNINFORMED_VARIANCE)
    for i, zs in enumerate(samples):
        arr = np.asarray(zs, dtype=float)
        if arr.size >= 1:
            means[i] = arr.mean()
        if arr.size >= 2:
            variances[i] = arr.var(ddof=1)
    return means, variances


def observe(truth: GroundTruth, region: int, rng: np.random.Generator) -> float:
    """One noisy observation z = x[region] + N(0, sigma2[region])."""
    if not 0 <= region < truth.n_regions:
        raise IndexError(f"region {region} out of range [0, {truth.n_regions})")
    return float(truth.x[region] + rng.normal(0.0, math.sqrt(truth.sigma2[region])))


def draw_ground_truth(
    n: int,
    rng: np.random.Generator,
    variance_range: tuple[float, float] = (0.0, 20.0),
    mean_range: tuple[float, float] = (-10.0, 10.0),
    noise_scale: float = 1.0,
) -> GroundTruth:
    """Draw truth uniformly from half-open ranges (lo, hi].

    ``u in [0, 1)`` is mapped to ``hi - u*(hi - lo)``, so exact-zero
    variances never occur.  ``noise_scale`` multiplies the drawn variances
    (noise-scaled-by-team-size experiments).
    """
    vlo, vhi = variance_range
    mlo, mhi = mean_range
    sigma2 = (vhi - rng.random(n) * (vhi - vlo)) * noise_scale
    x = mhi - rng.random(n) * (mhi - mlo)
    return GroundTruth(x=x, sigma2=sigma2)
