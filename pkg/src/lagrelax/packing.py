"""Greedy Hamming packings of the hypercube and exact distance checking.

``vg_packing(s)`` enumerates {0,1}^s in ascending integer order starting at
the zero vector and keeps a point iff it is Hamming distance >= ceil(s/8)
from everything kept so far. The kept set always meets the Gilbert volume
bound 2^s / V(s, d-1), which is asserted (not assumed) to dominate
2^ceil(s/8) in the supported range 8 <= s <= 24.

``min_pairwise_distance`` verifies the minimum distance exactly without
touching all O(M^2) pairs: for each candidate distance e it marks radius
floor(e/2) balls around every codeword in a 2^s table and probes radius
ceil(e/2) balls for foreign marks. Two codewords at distance <= e always
collide (split the difference into the two radii); collisions never occur
otherwise, so the first e that collides is the exact minimum distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .errors import DimensionError, UnsupportedProblemError

MAX_PACKING_DIMENSION = 24


def ball_masks(s: int, r: int) -> np.ndarray:
    """All s-bit codes of Hamming weight <= r, ascending (uint32)."""
    masks = [0]
    for w in range(1, r + 1):
        for bits in combinations(range(s), w):
            m = 0
            for b in bits:
                m |= 1 << b
            masks.append(m)
    masks.sort()
    return np.asarray(masks, dtype=np.uint32)


def min_pairwise_distance(encodings, s: int) -> int:
    """Exact minimum pairwise Hamming distance of distinct s-bit codes."""
    codes = np.asarray(encodings, dtype=np.uint32)
    m = codes.shape[0]
    if m < 2:
        raise DimensionError("need at least two codewords")
    if s > MAX_PACKING_DIMENSION:
        raise UnsupportedProblemError(f"s = {s} exceeds the table limit {MAX_PACKING_DIMENSION}")
    ids = np.arange(m, dtype=np.int32)
    marker = np.empty(1 << s, dtype=np.int32)
    for e in range(1, s + 1):
        marker.fill(-1)
        r_mark = e // 2
        r_probe = e - r_mark
        # mark phase: a collision here means two codewords within 2*r_mark <= e
        for mask in ball_masks(s, r_mark):
            pts = codes ^ mask
            if np.any(marker[pts] != -1):
                return e
            marker[pts] = ids
        # probe phase: a foreign mark within r_probe means distance <= e
        for mask in ball_masks(s, r_probe):
            hits = marker[codes ^ mask]
            if np.any((hits != -1) & (hits != ids)):
                return e
    raise DimensionError("codewords are not distinct")  # e = s must collide for m >= 2


@dataclass(frozen=True)
class PackingSet:
    codewords: np.ndarray  # (M, s) uint8, row i = binary vector of encodings[i]
    encodings: np.ndarray  # (M,) uint32 bit codes, bit k = coordinate k
    min_hamming: int
    target_distance: int

    @property
    def n_codewords(self) -> int:
        return int(self.encodings.shape[0])

    @property
    def s(self) -> int:
        return int(self.codewords.shape[1])


def vg_packing(s: int) -> PackingSet:
    """Greedy packing of {0,1}^s at distance d = ceil(s/8) (see module doc)."""
    if s < 8:
        raise UnsupportedProblemError("packing construction requires s >= 8")
    if s > MAX_PACKING_DIMENSION:
        raise UnsupportedProblemError(
            f"s = {s} exceeds the enumeration limit {MAX_PACKING_DIMENSION}"
        )
    d = -(-s // 8)  # ceil(s/8)
    encodings = kernels.greedy_packing(s, d)
    min_h = min_pairwise_distance(encodings, s)
    assert encodings[0] == 0, "greedy must keep the zero vector first"
    assert min_h >= d, f"construction broke its distance guarantee ({min_h} < {d})"
    assert encodings.shape[0] >= 2**d, "cardinality fell below 2^d"
    codewords = ((encodings[:, None] >> np.arange(s)[None, :]) & 1).astype(np.uint8)
    return PackingSet(
        codewords=codewords,
        encodings=encodings,
        min_hamming=min_h,
        target_distance=d,
    )
