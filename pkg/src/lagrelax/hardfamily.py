"""Two-point objective distributions with closed-form population risks.

A family draws each objective coordinate independently:

    c_k = mu + sigma  with probability p_k,   c_k = mu  otherwise,
    p_k = (1 + epsilon)/2  if v_k = 1  else  (1 - epsilon)/2,

over restricted instances. The "dual-lb" variant exposes the exact
population dual risk R(pi) = sum_k J_k(pi_k) (piecewise linear, maximized
at mu*1 + sigma*v) and a sharpness inequality; the "warmstart-lb" variant
fixes the supports to {1, 2} and is used for mean-estimation experiments,
where the target is E[c_k] = 3/2 + (epsilon/2)(2 v_k - 1).

KL divergences between two families (same epsilon, different v) are exact
product-Bernoulli sums; ``kl_and_fano`` also reports the quadratic upper
bound 4*N*s*epsilon^2 and the critical bias for which that bound matches
the hypothesis-testing budget (s/16 - 1) * ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateFamilyError, DimensionError, DomainError
from .instances import MilpInstance, MultiplierVector, ProblemBounds, make_restricted_instance

VARIANTS = ("dual-lb", "warmstart-lb")


@dataclass(frozen=True)
class HardFamilySpec:
    s: int
    mu: float
    sigma: float
    epsilon: float
    v: tuple
    pi_max: float
    variant: str = "dual-lb"
    B: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "warmstart-lb":
            # supports fixed to {1, 2}: mu and sigma are not free parameters
            object.__setattr__(self, "mu", 1.0)
            object.__setattr__(self, "sigma", 1.0)
        if self.s < 1:
            raise DimensionError("s must be >= 1")
        v = tuple(int(x) for x in np.asarray(self.v).ravel())
        if len(v) != self.s:
            raise DimensionError(f"v has length {len(v)}, expected s = {self.s}")
        if any(x not in (0, 1) for x in v):
            raise DomainError("v must be binary")
        object.__setattr__(self, "v", v)
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not 0.0 <= self.epsilon < 0.5:
            raise DomainError("epsilon must lie in [0, 1/2)")
        if not self.pi_max > 0:
            raise DomainError("pi_max must be positive")
        if not self.B > 0:
            raise DomainError("B must be positive")
        if self.variant == "dual-lb" and not self.mu + self.sigma < self.pi_max:
            raise DomainError("dual-lb requires mu + sigma < pi_max (interior optimum)")
        if self.variant == "warmstart-lb" and self.pi_max < 2.0:
            raise DomainError("warmstart-lb requires pi_max >= 2 (the upper support)")

    @property
    def hi(self) -> float:
        return self.mu + self.sigma

    @property
    def hi_probability(self) -> np.ndarray:
        """Per-coordinate probability that c_k takes the upper support value."""
        v = np.asarray(self.v, dtype=np.float64)
        return (1.0 + self.epsilon * (2.0 * v - 1.0)) / 2.0

    @property
    def bounds(self) -> ProblemBounds:
        return ProblemBounds(B=self.B, pi_max=self.pi_max)


def sample_objectives(spec: HardFamilySpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw an (n, s) matrix of objective vectors from the family.

    Bernoulli draws compare uniform 64-bit integers against fixed integer
    thresholds floor(p * 2^64), which is exactly reproducible across
    platforms and numpy versions (no float rounding in the sampler).
    """
    if n < 1:
        raise DimensionError("n must be >= 1")
    thresholds = np.array(
        [np.uint64(int(p * 2**64)) for p in spec.hi_probability], dtype=np.uint64
    )
    draws = rng.integers(0, 2**64, size=(n, spec.s), dtype=np.uint64, endpoint=False)
    return np.where(draws < thresholds[None, :], spec.hi, spec.mu)


def sample_instance(spec: HardFamilySpec, rng: np.random.Generator) -> MilpInstance:
    """One restricted instance drawn from the family."""
    return make_restricted_instance(sample_objectives(spec, rng, 1)[0])


def _risk_matrix(spec: HardFamilySpec, pi_rows: np.ndarray) -> np.ndarray:
    """Exact per-coordinate expected dual terms J_k(pi_k) for each row of
    multipliers; returns shape (rows, s)."""
    pi = np.atleast_2d(np.asarray(pi_rows, dtype=np.float64))
    if pi.shape[1] != spec.s:
        raise DimensionError(f"pi has {pi.shape[1]} coordinates, expected {spec.s}")
    if np.any(pi < 0) or np.any(pi > spec.pi_max):
        raise DomainError("pi must lie in [0, pi_max]^s")
    p = spec.hi_probability[None, :]
    mu, hi = spec.mu, spec.hi
    half = 0.5 * pi
    low = half  # pi <= mu: c - pi/2 >= mu - pi/2 >= pi/2 on both supports
    mid = p * half + (1.0 - p) * (mu - half)
    top = p * (hi - half) + (1.0 - p) * (mu - half)
    return np.where(pi <= mu, low, np.where(pi <= hi, mid, top))


def population_risk(spec: HardFamilySpec, pi) -> float:
    """Exact expected dual value R(pi) = sum_k E[min(pi_k/2, c_k - pi_k/2)]."""
    if spec.variant != "dual-lb":
        raise ConfigError("population_risk is defined for the dual-lb variant")
    if isinstance(pi, MultiplierVector):
        pi = pi.values
    return float(_risk_matrix(spec, pi).sum(axis=1)[0])


def population_risk_rows(spec: HardFamilySpec, pi_rows: np.ndarray) -> np.ndarray:
    """Vectorized :func:`population_risk` over rows of multipliers."""
    if spec.variant != "dual-lb":
        raise ConfigError("population_risk is defined for the dual-lb variant")
    return _risk_matrix(spec, pi_rows).sum(axis=1)


def optimal_multiplier(spec: HardFamilySpec) -> MultiplierVector:
    """The unique population-risk maximizer mu*1 + sigma*v (dual-lb, eps > 0)."""
    if spec.variant != "dual-lb":
        raise ConfigError("optimal_multiplier is defined for the dual-lb variant")
    if spec.epsilon == 0.0:
        raise DegenerateFamilyError(
            "epsilon = 0 leaves the maximizer non-unique on [mu, mu + sigma]"
        )
    return MultiplierVector(spec.mu + spec.sigma * np.asarray(spec.v, dtype=np.float64))


def max_population_risk(spec: HardFamilySpec) -> float:
    """R at the maximizer; the reference point for excess-risk numbers."""
    return population_risk(spec, optimal_multiplier(spec))


def sharpness_gap(spec: HardFamilySpec, pi) -> tuple[float, float]:
    """(lhs, rhs) of the sharpness inequality
    R(pi*) - R(pi) >= (epsilon/2) * ||pi* - pi||_1."""
    star = optimal_multiplier(spec)
    lhs = population_risk(spec, star) - population_risk(spec, pi)
    if isinstance(pi, MultiplierVector):
        pi = pi.values
    pi = np.asarray(pi, dtype=np.float64).ravel()
    rhs = 0.5 * spec.epsilon * float(np.abs(star.values - pi).sum())
    return lhs, rhs


def optimal_warmstart(spec: HardFamilySpec) -> np.ndarray:
    """The population warm-start target E[c] (coordinate-wise mean of the
    two-point law); for warmstart-lb this is 3/2 + (epsilon/2)(2v - 1)."""
    return spec.mu + spec.sigma * spec.hi_probability


def objective_variance(spec: HardFamilySpec) -> np.ndarray:
    """Per-coordinate Var(c_k) = sigma^2 * p_k * (1 - p_k)."""
    p = spec.hi_probability
    return spec.sigma**2 * p * (1.0 - p)


@dataclass(frozen=True)
class KlFanoDiagnostics:
    hamming_distance: int
    kl_per_flipped_coordinate: float
    kl_one_sample: float
    kl_n_sample: float
    kl_quadratic_bound: float  # 4 * N * s * epsilon^2
    fano_applicable: bool  # the critical-bias formula needs s > 16
    fano_epsilon: float | None


def kl_and_fano(s: int, n: int, epsilon: float, v, v_prime) -> KlFanoDiagnostics:
    """Exact product-Bernoulli KL between two families differing in v,
    its quadratic upper bound, and the critical bias epsilon* at which
    4*N*s*eps^2 equals the testing budget (s/16 - 1) * ln 2 (s > 16)."""
    if not 0.0 < epsilon < 0.5:
        raise DomainError("epsilon must lie in (0, 1/2)")
    if n < 1:
        raise DimensionError("n must be >= 1")
    v = np.asarray(v).ravel().astype(np.int64)
    v_prime = np.asarray(v_prime).ravel().astype(np.int64)
    if v.shape[0] != s or v_prime.shape[0] != s:
        raise DimensionError("v and v_prime must have length s")
    if np.any((v != 0) & (v != 1)) or np.any((v_prime != 0) & (v_prime != 1)):
        raise DomainError("v and v_prime must be binary")
    d_h = int(np.count_nonzero(v != v_prime))
    p = (1.0 + epsilon) / 2.0
    q = (1.0 - epsilon) / 2.0
    kl_flip = p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    kl_one = d_h * kl_flip
    applicable = s > 16
    fano_eps = math.sqrt(((s / 16.0 - 1.0) * math.log(2.0)) / (4.0 * n * s)) if applicable else None
    return KlFanoDiagnostics(
        hamming_distance=d_h,
        kl_per_flipped_coordinate=kl_flip,
        kl_one_sample=kl_one,
        kl_n_sample=n * kl_one,
        kl_quadratic_bound=4.0 * n * s * epsilon**2,
        fano_applicable=applicable,
        fano_epsilon=fano_eps,
    )
