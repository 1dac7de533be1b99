"""The three multiplier learners.

* ``sga_learn`` — one projected subgradient step per streamed instance with
  constant step, returning the average of the pre-update iterates.
* ``erm_learn`` — deterministic projected subgradient ascent on the
  sample-average dual, returning the best-value iterate.
* ``warmstart_learn`` — coordinate-wise mean of per-instance optimal
  multipliers (mean estimation; no dual solves on restricted instances).

Streams of restricted instances are routed through the compiled kernels;
the generic paths accept anything the subproblem oracle handles and
reproduce the kernel recursions exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dual import dual_eval, min_norm_pi_star
from .errors import ConfigError, DimensionError, DomainError
from .instances import MilpInstance, MultiplierVector, ProblemBounds


@dataclass(frozen=True)
class SgaConfig:
    n_instances: int
    pi_max: float
    B: float = 1.0
    eta: float | None = None  # default pi_max / (2 B sqrt(N))
    seed: int | None = None

    def __post_init__(self):
        if self.n_instances < 1:
            raise ConfigError("n_instances must be >= 1")
        if not self.pi_max > 0:
            raise DomainError("pi_max must be positive")
        if not self.B > 0:
            raise DomainError("B must be positive")
        if self.eta is not None and self.eta < 0:
            raise DomainError("eta must be >= 0")

    @property
    def step(self) -> float:
        if self.eta is not None:
            return self.eta
        return self.pi_max / (2.0 * self.B * math.sqrt(self.n_instances))


@dataclass(frozen=True)
class LearnedMultipliers:
    pi: MultiplierVector
    learner: str  # "sga" | "erm" | "warmstart"
    n_instances: int
    seed: int | None
    n_iterations: int


def _gather(instances, what: str) -> list[MilpInstance]:
    instances = list(instances)
    if not instances:
        raise ConfigError(f"{what} is empty")
    s = instances[0].s
    for i, inst in enumerate(instances):
        if inst.s != s:
            raise DimensionError(f"instance {i} has s={inst.s}, expected {s}")
    return instances


def sga_learn(stream, cfg: SgaConfig) -> LearnedMultipliers:
    """Single-pass stream learner: pi_1 = 0; for t = 1..N take one projected
    step along the instance subgradient; return (1/N) sum of pi_1..pi_N."""
    instances = _gather(stream, "stream")
    if len(instances) != cfg.n_instances:
        raise ConfigError(f"stream has {len(instances)} instances, cfg says {cfg.n_instances}")
    if all(inst.is_restricted for inst in instances):
        c_matrix = np.stack([inst.c for inst in instances])
        pi_bar = kernels.sga_stream(c_matrix, cfg.step, cfg.pi_max)
    else:
        pi_bar = _sga_generic(instances, cfg)
    return LearnedMultipliers(
        pi=MultiplierVector(pi_bar),
        learner="sga",
        n_instances=cfg.n_instances,
        seed=cfg.seed,
        n_iterations=cfg.n_instances,
    )


def sga_learn_restricted(c_matrix: np.ndarray, cfg: SgaConfig) -> LearnedMultipliers:
    """Kernel entry for a pre-stacked matrix of restricted objectives
    (row t = objective of stream instance t)."""
    c_matrix = np.asarray(c_matrix, dtype=np.float64)
    if c_matrix.ndim != 2:
        raise DimensionError("expected a 2-d (N, s) objective matrix")
    if c_matrix.shape[0] != cfg.n_instances:
        raise ConfigError(f"matrix has {c_matrix.shape[0]} rows, cfg says {cfg.n_instances}")
    pi_bar = kernels.sga_stream(c_matrix, cfg.step, cfg.pi_max)
    return LearnedMultipliers(
        pi=MultiplierVector(pi_bar),
        learner="sga",
        n_instances=cfg.n_instances,
        seed=cfg.seed,
        n_iterations=cfg.n_instances,
    )


def _sga_generic(instances, cfg: SgaConfig) -> np.ndarray:
    """Oracle-driven replica of the stream recursion (any instance kind)."""
    s = instances[0].s
    pi = np.zeros(s)
    acc = np.zeros(s)
    for t, inst in enumerate(instances):
        acc += pi
        try:
            ev = dual_eval(pi, inst)
        except Exception as exc:
            raise type(exc)(f"stream instance {t}: {exc}") from exc
        pi = np.clip(pi + cfg.step * ev.subgradient, 0.0, cfg.pi_max)
    return acc / len(instances)


def default_erm_iterations(n_instances: int, s: int) -> int:
    return int(math.ceil(50.0 * n_instances * math.sqrt(s)))


def erm_learn(
    sample,
    bounds: ProblemBounds,
    iterations: int | None = None,
    seed: int | None = None,
) -> LearnedMultipliers:
    """Maximize the sample-average dual over the box by deterministic
    projected subgradient ascent (step D/(L sqrt(t))), best-iterate output."""
    instances = _gather(sample, "sample")
    n = len(instances)
    s = instances[0].s
    T = iterations if iterations is not None else default_erm_iterations(n, s)
    if T < 1:
        raise ConfigError("iterations must be >= 1")
    step_scale = bounds.diameter(s) / bounds.lipschitz(s)  # = pi_max / (2B)
    if all(inst.is_restricted for inst in instances):
        c_matrix = np.stack([inst.c for inst in instances])
        best_pi, _ = kernels.erm_ascent(c_matrix, step_scale, bounds.pi_max, T)
    else:
        best_pi = _erm_generic(instances, bounds, step_scale, T)
    return LearnedMultipliers(
        pi=MultiplierVector(best_pi),
        learner="erm",
        n_instances=n,
        seed=seed,
        n_iterations=T,
    )


def erm_learn_restricted(
    c_matrix: np.ndarray,
    bounds: ProblemBounds,
    iterations: int | None = None,
    seed: int | None = None,
) -> LearnedMultipliers:
    """Kernel entry for a pre-stacked (N, s) matrix of restricted objectives."""
    c_matrix = np.asarray(c_matrix, dtype=np.float64)
    if c_matrix.ndim != 2:
        raise DimensionError("expected a 2-d (N, s) objective matrix")
    n, s = c_matrix.shape
    T = iterations if iterations is not None else default_erm_iterations(n, s)
    if T < 1:
        raise ConfigError("iterations must be >= 1")
    step_scale = bounds.diameter(s) / bounds.lipschitz(s)
    best_pi, _ = kernels.erm_ascent(c_matrix, step_scale, bounds.pi_max, T)
    return LearnedMultipliers(
        pi=MultiplierVector(best_pi),
        learner="erm",
        n_instances=n,
        seed=seed,
        n_iterations=T,
    )


def _erm_generic(instances, bounds: ProblemBounds, step_scale: float, T: int) -> np.ndarray:
    s = instances[0].s
    n = len(instances)
    pi = np.zeros(s)
    best_pi = pi.copy()
    best_val = -np.inf
    for t in range(1, T + 1):
        val = 0.0
        grad = np.zeros(s)
        for inst in instances:
            ev = dual_eval(pi, inst)
            val += ev.value
            grad += ev.subgradient
        val /= n
        grad /= n
        if val > best_val:
            best_val = val
            best_pi = pi.copy()
        pi = np.clip(pi + (step_scale / np.sqrt(t)) * grad, 0.0, bounds.pi_max)
    return best_pi


def warmstart_learn(sample, bounds: ProblemBounds, cfg=None) -> LearnedMultipliers:
    """Mean of per-instance optimal multipliers, clipped to the box.

    Restricted instances use the exact closed form clip(c, 0, pi_max);
    anything else goes through min_norm_pi_star with ``cfg``.
    """
    instances = _gather(sample, "sample")
    stars = []
    for inst in instances:
        if inst.is_restricted:
            stars.append(np.clip(inst.c, 0.0, bounds.pi_max))
        else:
            stars.append(min_norm_pi_star(inst, bounds, cfg).pi.values)
    phi = np.clip(np.mean(np.stack(stars), axis=0), 0.0, bounds.pi_max)
    return LearnedMultipliers(
        pi=MultiplierVector(phi),
        learner="warmstart",
        n_instances=len(instances),
        seed=None,
        n_iterations=0,
    )


def warmstart_learn_restricted(c_matrix: np.ndarray, bounds: ProblemBounds) -> LearnedMultipliers:
    """Closed-form warm start for a pre-stacked (N, s) restricted sample."""
    c_matrix = np.asarray(c_matrix, dtype=np.float64)
    if c_matrix.ndim != 2:
        raise DimensionError("expected a 2-d (N, s) objective matrix")
    stars = np.clip(c_matrix, 0.0, bounds.pi_max)
    phi = np.clip(np.mean(stars, axis=0), 0.0, bounds.pi_max)
    return LearnedMultipliers(
        pi=MultiplierVector(phi),
        learner="warmstart",
        n_instances=c_matrix.shape[0],
        seed=None,
        n_iterations=0,
    )
