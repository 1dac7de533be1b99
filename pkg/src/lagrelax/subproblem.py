"""Inner minimizations: the relaxed subproblem and brute-force optima.

For a multiplier pi the subproblem is

    min_x  c.x + pi.(b - A x)   s.t.  C x >= d,  x binary,

solved coordinatewise in closed form on restricted instances and by
enumeration otherwise. ``solve_opt_bruteforce`` enumerates the original
(unrelaxed) problem; both respect a hard cap on p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleProblemError, UnsupportedProblemError
from .instances import (
    ENUMERATION_LIMIT,
    MilpInstance,
    as_multiplier_array,
    iter_feasible_binary,
)


@dataclass(frozen=True)
class SubproblemSolution:
    x_star: np.ndarray
    value: float


@dataclass(frozen=True)
class OptResult:
    value: float
    x_star: np.ndarray


def restricted_subproblem_values(pi_grid: np.ndarray, c_rows: np.ndarray) -> np.ndarray:
    """Subproblem values sum_k min(pi_k/2, c_k - pi_k/2) for every
    (multiplier row, objective row) pair; returns shape (G, n)."""
    pi_grid = np.atleast_2d(np.asarray(pi_grid, dtype=np.float64))
    c_rows = np.atleast_2d(np.asarray(c_rows, dtype=np.float64))
    half = 0.5 * pi_grid  # (G, s)
    # broadcast: (G, 1, s) against (1, n, s)
    terms = np.minimum(half[:, None, :], c_rows[None, :, :] - half[:, None, :])
    return terms.sum(axis=2)


def solve_subproblem(
    pi, inst: MilpInstance, enumeration_limit: int = ENUMERATION_LIMIT
) -> SubproblemSolution:
    """Minimize c.x + pi.(b - Ax) over the kept-feasible binary points.

    Restricted instances use the closed form x_k = 1 iff c_k - pi_k < 0
    (ties to 0); anything else is enumerated. m > 0 is not supported.
    """
    pi = as_multiplier_array(pi, inst.s)
    if inst.is_restricted:
        reduced = inst.c - pi
        x = (reduced < 0.0).astype(np.float64)
        half = 0.5 * pi
        value = float(np.minimum(half, inst.c - half).sum())
        return SubproblemSolution(x_star=x, value=value)
    return solve_subproblem_enumerated(pi, inst, enumeration_limit)


def solve_subproblem_enumerated(
    pi, inst: MilpInstance, enumeration_limit: int = ENUMERATION_LIMIT
) -> SubproblemSolution:
    """Enumeration path of :func:`solve_subproblem` (usable on restricted
    instances too, for cross-checking the closed form)."""
    pi = as_multiplier_array(pi, inst.s)
    if inst.m > 0:
        raise UnsupportedProblemError("subproblem enumeration handles binary-only instances")
    if inst.p > enumeration_limit:
        raise UnsupportedProblemError(
            f"p = {inst.p} exceeds the enumeration limit {enumeration_limit}"
        )
    w = inst.c - inst.A.T @ pi
    offset = float(pi @ inst.b)
    best_val = np.inf
    best_x = None
    for X in iter_feasible_binary(inst):
        vals = X @ w
        i = int(np.argmin(vals))
        if vals[i] < best_val:  # strict: keeps the first minimizer in bit order
            best_val = float(vals[i])
            best_x = X[i].copy()
    if best_x is None:
        raise InfeasibleProblemError("no binary point satisfies the kept constraints")
    return SubproblemSolution(x_star=best_x, value=best_val + offset)


def solve_opt_bruteforce(
    inst: MilpInstance, enumeration_limit: int = ENUMERATION_LIMIT
) -> OptResult:
    """Exact optimum of the unrelaxed problem by enumerating binary points."""
    if inst.m > 0:
        raise UnsupportedProblemError("brute force handles binary-only instances")
    if inst.p > enumeration_limit:
        raise UnsupportedProblemError(
            f"p = {inst.p} exceeds the enumeration limit {enumeration_limit}"
        )
    best_val = np.inf
    best_x = None
    for X in iter_feasible_binary(inst):
        mask = np.all(X @ inst.A.T >= inst.b[None, :], axis=1)
        if not mask.any():
            continue
        Xf = X[mask]
        vals = Xf @ inst.c
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_x = Xf[i].copy()
    if best_x is None:
        raise InfeasibleProblemError("no feasible binary point (A x >= b and C x >= d)")
    return OptResult(value=best_val, x_star=best_x)
