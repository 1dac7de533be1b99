"""Dual evaluation and per-instance dual maximization.

``dual_eval`` returns the dual value u(pi, P) together with the
supergradient g = b - A x* of the concave dual (called "subgradient"
throughout, following convention). ``solve_dual`` runs projected
subgradient ascent over the box with best-iterate tracking;
``min_norm_pi_star`` resolves maximizer ties toward the minimum-norm
point (closed form on restricted instances, Tikhonov path elsewhere).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DomainError
from .instances import MilpInstance, MultiplierVector, ProblemBounds, as_multiplier_array
from .subproblem import solve_subproblem


@dataclass(frozen=True)
class DualEval:
    value: float
    subgradient: np.ndarray
    x_star: np.ndarray


@dataclass(frozen=True)
class DualSolveConfig:
    iterations: int = 2000
    initial: np.ndarray | None = None
    step: str = "decreasing"  # "decreasing" (scale/sqrt(t)) or "constant"
    step_scale: float | None = None  # default D/L = pi_max / (2B)
    norm_regularizer_weight: float = 0.0
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.step not in ("decreasing", "constant"):
            raise ConfigError(f"unknown step schedule {self.step!r}")
        if self.step_scale is not None and not self.step_scale > 0:
            raise ConfigError("step_scale must be positive")
        if self.norm_regularizer_weight < 0:
            raise ConfigError("norm_regularizer_weight must be >= 0")


@dataclass(frozen=True)
class DualSolveResult:
    pi: MultiplierVector
    value: float
    best_iteration: int
    n_iterations: int
    final_pi: np.ndarray
    converged: bool


@dataclass(frozen=True)
class MinNormResult:
    pi: MultiplierVector
    value: float
    exact: bool


def dual_eval(pi, inst: MilpInstance) -> DualEval:
    """Dual value and subgradient g = b - A x* at pi."""
    sol = solve_subproblem(pi, inst)
    pi = as_multiplier_array(pi, inst.s)
    if inst.is_restricted:
        g = inst.b - sol.x_star
    else:
        g = inst.b - inst.A @ sol.x_star
    return DualEval(value=sol.value, subgradient=g, x_star=sol.x_star)


def solve_dual(
    inst: MilpInstance, bounds: ProblemBounds, cfg: DualSolveConfig | None = None
) -> DualSolveResult:
    """Projected subgradient ascent on u(., P) over [0, pi_max]^s.

    Returns the best-value iterate (subgradient ascent is non-monotone, so
    the last iterate can be worse). With norm_regularizer_weight > 0 the
    ascent targets u(pi, P) - lambda * ||pi||^2 instead; the reported value
    is always the plain dual value at the chosen iterate.
    """
    cfg = cfg or DualSolveConfig()
    s = inst.s
    if cfg.initial is None:
        pi = np.zeros(s)
    else:
        pi = as_multiplier_array(cfg.initial, s).copy()
        if np.any(pi > bounds.pi_max):
            raise DomainError("initial point lies outside the multiplier box")
    scale = cfg.step_scale
    if scale is None:
        scale = bounds.diameter(s) / bounds.lipschitz(s)  # = pi_max / (2B)
    lam = cfg.norm_regularizer_weight
    best_obj = -np.inf
    best_val = -np.inf
    best_pi = pi.copy()
    best_iter = 0
    half_best = -np.inf
    halfway = cfg.iterations // 2
    for t in range(1, cfg.iterations + 1):
        ev = dual_eval(pi, inst)
        obj = ev.value - lam * float(pi @ pi)
        if obj > best_obj:
            best_obj = obj
            best_val = ev.value
            best_pi = pi.copy()
            best_iter = t
        if t == halfway:
            half_best = best_obj
        eta = scale / np.sqrt(t) if cfg.step == "decreasing" else scale
        g = ev.subgradient - 2.0 * lam * pi
        pi = np.clip(pi + eta * g, 0.0, bounds.pi_max)
    converged = bool(np.isfinite(half_best) and best_obj - half_best <= cfg.tolerance)
    return DualSolveResult(
        pi=MultiplierVector(best_pi),
        value=best_val,
        best_iteration=best_iter,
        n_iterations=cfg.iterations,
        final_pi=pi,
        converged=converged,
    )


def min_norm_pi_star(
    inst: MilpInstance, bounds: ProblemBounds, cfg: DualSolveConfig | None = None
) -> MinNormResult:
    """Minimum-norm dual maximizer.

    Restricted instances admit the closed form clip(c, 0, pi_max): each
    coordinate term min(pi_k/2, c_k - pi_k/2) rises until pi_k = c_k and
    falls after, so the maximizer is unique for c_k > 0 and the min-norm
    choice on the flat set {c_k <= 0} is pi_k = 0. Everything else gets a
    Tikhonov path (three halved regularizer weights, warm-started), which
    is approximate.
    """
    if inst.is_restricted:
        pi = np.clip(inst.c, 0.0, bounds.pi_max)
        ev = dual_eval(pi, inst)
        return MinNormResult(pi=MultiplierVector(pi), value=ev.value, exact=True)
    cfg = cfg or DualSolveConfig()
    lam0 = cfg.norm_regularizer_weight if cfg.norm_regularizer_weight > 0 else 0.05
    stage_cfg = cfg
    pi = None
    for j in range(3):
        stage_cfg = replace(
            cfg,
            norm_regularizer_weight=lam0 * 0.5**j,
            initial=pi if pi is not None else cfg.initial,
        )
        result = solve_dual(inst, bounds, stage_cfg)
        pi = result.final_pi
    ev = dual_eval(pi, inst)
    return MinNormResult(pi=MultiplierVector(pi), value=ev.value, exact=False)
