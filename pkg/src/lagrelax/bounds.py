"""Theoretical bound calculators and a tiny empirical Rademacher estimator.

All logarithms are natural. The Dudley-type constant is assembled from the
chaining proof (3 L D sqrt(pi)/2 with L = 2B sqrt(s), D = pi_max sqrt(s)),
giving C = 3 sqrt(pi) ~= 5.3174; the constant is ours per implementation,
the order in s and N is what the dominance tests actually exercise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedProblemError
from .subproblem import restricted_subproblem_values

DUDLEY_CONSTANT = 3.0 * math.sqrt(math.pi)
BOUND_CONSTANT_NOTE = "constant per implementation, order per theory"


def covering_bound(s: int, B: float, pi_max: float, delta: float) -> float:
    """Log covering number of the dual-value class at scale delta:
    s * ln(1 + 2 B pi_max s / delta)."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    _check_scales(s, B, pi_max)
    return s * math.log1p(2.0 * B * pi_max * s / delta)


def dudley_bound(s: int, n: int, B: float, pi_max: float) -> float:
    """Rademacher-complexity upper bound C * B * pi_max * s^1.5 / sqrt(N)."""
    _check_scales(s, B, pi_max)
    if n < 1:
        raise DomainError("N must be >= 1")
    return DUDLEY_CONSTANT * B * pi_max * s**1.5 / math.sqrt(n)


def sga_bound(s: int, n: int, B: float, pi_max: float) -> float:
    """Excess-risk guarantee of the averaged stream learner: 2 B pi_max s / sqrt(N)."""
    _check_scales(s, B, pi_max)
    if n < 1:
        raise DomainError("N must be >= 1")
    return 2.0 * B * pi_max * s / math.sqrt(n)


def erm_excess_bound(s: int, n: int, B: float, pi_max: float) -> float:
    """Excess-risk bound for the empirical maximizer: twice the Rademacher bound."""
    return 2.0 * dudley_bound(s, n, B, pi_max)


def warmstart_bound(s: int, n: int, pi_max: float) -> float:
    """Mean-estimation risk bound s * pi_max^2 / (4N) (variance of a
    [0, pi_max]-supported coordinate is at most pi_max^2/4)."""
    if not pi_max > 0:
        raise DomainError("pi_max must be positive")
    if n < 1:
        raise DomainError("N must be >= 1")
    return s * pi_max**2 / (4.0 * n)


def _check_scales(s: int, B: float, pi_max: float) -> None:
    if s < 1:
        raise DomainError("s must be >= 1")
    if not B > 0:
        raise DomainError("B must be positive")
    if not pi_max > 0:
        raise DomainError("pi_max must be positive")


@dataclass(frozen=True)
class BoundReport:
    s: int
    n: int
    B: float
    pi_max: float
    delta: float
    covering_log: float
    dudley_bound: float
    sga_bound: float
    erm_excess_bound: float
    warmstart_bound: float
    dudley_constant: float = DUDLEY_CONSTANT
    note: str = BOUND_CONSTANT_NOTE


def bound_report(s: int, n: int, B: float, pi_max: float, delta: float = 1.0) -> BoundReport:
    return BoundReport(
        s=s,
        n=n,
        B=B,
        pi_max=pi_max,
        delta=delta,
        covering_log=covering_bound(s, B, pi_max, delta),
        dudley_bound=dudley_bound(s, n, B, pi_max),
        sga_bound=sga_bound(s, n, B, pi_max),
        erm_excess_bound=erm_excess_bound(s, n, B, pi_max),
        warmstart_bound=warmstart_bound(s, n, pi_max),
    )


@dataclass(frozen=True)
class RademacherEstimate:
    estimate: float  # Monte Carlo grid-sup estimate
    std_error: float
    grid_correction: float  # Lipschitz cover of the grid gap: L * pi_max * sqrt(s) / G
    corrected_estimate: float  # estimate + grid_correction
    n_instances: int
    n_draws: int
    grid_points_per_dim: int


def empirical_rademacher(
    sample,
    pi_max: float,
    grid_points_per_dim: int,
    mc_draws: int,
    seed: int | None,
    B: float = 1.0,
) -> RademacherEstimate:
    """Monte Carlo estimate of the empirical Rademacher complexity
    E_sigma sup_pi (1/N) sum_i sigma_i u(pi, P_i) for restricted instances,
    with the sup taken over a uniform grid of the box (hence s <= 3)."""
    instances = list(sample)
    if not instances:
        raise ConfigError("sample is empty")
    if any(not inst.is_restricted for inst in instances):
        raise UnsupportedProblemError("the estimator handles restricted instances only")
    s = instances[0].s
    if any(inst.s != s for inst in instances):
        raise ConfigError("instances disagree on s")
    if s > 3:
        raise UnsupportedProblemError(f"grid of size G^s is impractical for s = {s}")
    if grid_points_per_dim < 2:
        raise ConfigError("need at least 2 grid points per dimension")
    if mc_draws < 100:
        raise ConfigError("need at least 100 Monte Carlo draws")
    if not pi_max > 0:
        raise DomainError("pi_max must be positive")
    n = len(instances)
    axis = np.linspace(0.0, pi_max, grid_points_per_dim)
    mesh = np.meshgrid(*([axis] * s), indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)  # (G^s, s)
    c_matrix = np.stack([inst.c for inst in instances])
    values = restricted_subproblem_values(grid, c_matrix)  # (G^s, N)
    rng = np.random.default_rng(seed)
    sigma = 2.0 * rng.integers(0, 2, size=(n, mc_draws)).astype(np.float64) - 1.0
    sups = (values @ sigma).max(axis=0) / n  # (T,)
    estimate = float(sups.mean())
    std_error = float(sups.std(ddof=1) / math.sqrt(mc_draws))
    lipschitz = 2.0 * B * math.sqrt(s)
    correction = lipschitz * pi_max * math.sqrt(s) / grid_points_per_dim
    return RademacherEstimate(
        estimate=estimate,
        std_error=std_error,
        grid_correction=correction,
        corrected_estimate=estimate + correction,
        n_instances=n,
        n_draws=mc_draws,
        grid_points_per_dim=grid_points_per_dim,
    )
