"""Problem instances, bound assumptions, and multiplier vectors.

An instance is the mixed-binary program

    min c.x   s.t.   x in R+^m x {0,1}^p,   A x >= b   (dualized),
                     C x >= d               (kept),

stored dense. ``make_restricted_instance`` builds the pure-binary special
case (A = I, b = 1/2, no kept constraints) that the learning pipeline and
the hard families live on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedProblemError

ENUMERATION_LIMIT = 24


def _as_matrix(a, n_rows: int | None, n_cols: int, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, n_cols)
    if arr.ndim != 2 or arr.shape[1] != n_cols:
        raise DimensionError(f"{name} must be 2-d with {n_cols} columns, got shape {arr.shape}")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise DimensionError(f"{name} must have {n_rows} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _as_vector(a, n: int | None, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64).ravel()
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} must have length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MilpInstance:
    """One problem instance (dense data, immutable after construction)."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    C: np.ndarray
    d: np.ndarray
    m: int
    p: int

    def __post_init__(self):
        if self.m < 0 or self.p < 0 or self.m + self.p < 1:
            raise DimensionError(f"need m >= 0, p >= 0, m + p >= 1 (got m={self.m}, p={self.p})")
        n = self.m + self.p
        object.__setattr__(self, "c", _as_vector(self.c, n, "c"))
        b = _as_vector(self.b, None, "b")
        if b.shape[0] < 1:
            raise DimensionError("need at least one dualized constraint row")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", _as_matrix(self.A, b.shape[0], n, "A"))
        d = _as_vector(self.d, None, "d")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "C", _as_matrix(self.C, d.shape[0], n, "C"))

    @property
    def n_vars(self) -> int:
        return self.m + self.p

    @property
    def s(self) -> int:
        """Number of dualized constraint rows (= multiplier dimension)."""
        return self.b.shape[0]

    @property
    def t(self) -> int:
        """Number of kept constraint rows."""
        return self.d.shape[0]

    @property
    def is_restricted(self) -> bool:
        """True for the pure-binary form A = I_s, b = 1/2, t = 0, m = 0."""
        return (
            self.m == 0
            and self.t == 0
            and self.s == self.p
            and bool(np.all(self.b == 0.5))
            and bool(np.array_equal(self.A, np.eye(self.p)))
        )


def make_restricted_instance(c) -> MilpInstance:
    """Binary instance with A = I, b = 1/2 and no kept constraints."""
    c = np.asarray(c, dtype=np.float64).ravel()
    p = c.shape[0]
    if p < 1:
        raise DimensionError("objective must have at least one coordinate")
    return MilpInstance(
        c=c,
        A=np.eye(p),
        b=np.full(p, 0.5),
        C=np.zeros((0, p)),
        d=np.zeros(0),
        m=0,
        p=p,
    )


@dataclass(frozen=True)
class ProblemBounds:
    """Scale assumptions: |b_k|, |(Ax)_k| <= B on feasible x, and the
    multiplier box [0, pi_max]^s."""

    B: float
    pi_max: float

    def __post_init__(self):
        if not (np.isfinite(self.B) and self.B > 0):
            raise DomainError(f"B must be positive and finite, got {self.B}")
        if not (np.isfinite(self.pi_max) and self.pi_max > 0):
            raise DomainError(f"pi_max must be positive and finite, got {self.pi_max}")

    def lipschitz(self, s: int) -> float:
        """Lipschitz constant of the dual function over the box: 2 B sqrt(s)."""
        return 2.0 * self.B * np.sqrt(s)

    def diameter(self, s: int) -> float:
        """Euclidean diameter of the box [0, pi_max]^s."""
        return self.pi_max * np.sqrt(s)


@dataclass(frozen=True)
class MultiplierVector:
    """Nonnegative multiplier vector; values are read-only."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.shape[0] < 1:
            raise DimensionError("multiplier vector must be non-empty")
        if not np.all(np.isfinite(v)):
            raise DomainError("multiplier vector contains non-finite entries")
        if np.any(v < 0):
            raise DomainError("multipliers must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, k):
        return self.values[k]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def in_box(self, pi_max: float) -> bool:
        return bool(np.all(self.values <= pi_max))

    def as_array(self) -> np.ndarray:
        return self.values


def as_multiplier_array(pi, s: int) -> np.ndarray:
    """Coerce a MultiplierVector / array-like to a validated length-s array."""
    if isinstance(pi, MultiplierVector):
        arr = pi.values
    else:
        arr = np.asarray(pi, dtype=np.float64).ravel()
    if arr.shape[0] != s:
        raise DimensionError(f"multiplier has length {arr.shape[0]}, instance needs {s}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("multiplier contains non-finite entries")
    if np.any(arr < 0):
        raise DomainError("multipliers must be nonnegative")
    return arr


def binary_point_matrix(p: int, start: int, count: int) -> np.ndarray:
    """Rows are the binary vectors for integers start..start+count-1
    (bit k of the integer is coordinate k)."""
    codes = np.arange(start, start + count, dtype=np.int64)
    return ((codes[:, None] >> np.arange(p, dtype=np.int64)[None, :]) & 1).astype(np.float64)


def iter_feasible_binary(inst: MilpInstance, chunk: int = 1 << 16) -> Iterable[np.ndarray]:
    """Yield chunks of binary points satisfying the kept constraints C x >= d."""
    p = inst.p
    total = 1 << p
    for start in range(0, total, chunk):
        X = binary_point_matrix(p, start, min(chunk, total - start))
        if inst.t > 0:
            mask = np.all(X @ inst.C.T >= inst.d[None, :], axis=1)
            X = X[mask]
        if X.shape[0]:
            yield X


@dataclass(frozen=True)
class BoundsCheckReport:
    """Outcome of enumerating |b_k| and |(Ax)_k| against B."""

    passed: bool
    b_max_abs: float
    ax_max_abs: float
    tightest_coordinate: int
    witness_x: np.ndarray | None
    n_points_checked: int
    reason: str = ""


def validate_bounds(
    inst: MilpInstance, bounds: ProblemBounds, enumeration_limit: int = ENUMERATION_LIMIT
) -> BoundsCheckReport:
    """Check the scale assumption |b_k| <= B and |(Ax)_k| <= B over every
    feasible binary x, by enumeration (binary-only instances)."""
    if inst.m > 0:
        raise UnsupportedProblemError("bound checking handles binary-only instances (m = 0)")
    if inst.p > enumeration_limit:
        raise UnsupportedProblemError(
            f"p = {inst.p} exceeds the enumeration limit {enumeration_limit}"
        )
    B = bounds.B
    b_abs = np.abs(inst.b)
    per_coord = b_abs.copy()
    ax_max = 0.0
    witness = None
    n_checked = 0
    for X in iter_feasible_binary(inst):
        AX = np.abs(X @ inst.A.T)  # (chunk, s)
        n_checked += X.shape[0]
        chunk_max = AX.max(axis=0)
        per_coord = np.maximum(per_coord, chunk_max)
        cm = float(AX.max()) if AX.size else 0.0
        if cm > ax_max:
            ax_max = cm
            if cm > B and witness is None:
                i, _ = np.unravel_index(np.argmax(AX), AX.shape)
                witness = X[i].copy()
    tightest = int(np.argmax(per_coord))
    b_bad = float(b_abs.max()) > B
    ax_bad = ax_max > B
    passed = not (b_bad or ax_bad)
    reason = ""
    if b_bad:
        reason = f"|b_{int(np.argmax(b_abs))}| = {float(b_abs.max())} exceeds B = {B}"
    elif ax_bad:
        reason = f"|(Ax)_{tightest}| = {ax_max} exceeds B = {B}"
    return BoundsCheckReport(
        passed=passed,
        b_max_abs=float(b_abs.max()),
        ax_max_abs=ax_max,
        tightest_coordinate=tightest,
        witness_x=witness,
        n_points_checked=n_checked,
        reason=reason,
    )


def instance_to_dict(inst: MilpInstance) -> dict:
    return {
        "c": inst.c.tolist(),
        "A": inst.A.tolist(),
        "b": inst.b.tolist(),
        "C": inst.C.tolist(),
        "d": inst.d.tolist(),
        "m": inst.m,
        "p": inst.p,
    }


def instance_from_dict(data: dict) -> MilpInstance:
    try:
        return MilpInstance(
            c=data["c"],
            A=data["A"],
            b=data["b"],
            C=data["C"],
            d=data["d"],
            m=int(data["m"]),
            p=int(data["p"]),
        )
    except KeyError as exc:
        raise DimensionError(f"instance JSON is missing field {exc}") from exc


def load_instance(path) -> MilpInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(inst: MilpInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh)
        fh.write("\n")
