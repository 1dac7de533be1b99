"""Pure-numpy fallback for the compiled kernels.

Mirrors ``_core.pyx`` operation-for-operation where bit-identical output is
promised (``sga_stream``, ``greedy_packing``). ``erm_ascent`` follows the
identical iterate path but sums its objective in numpy order, so its value
agrees with the compiled backend only to float-reduction precision.
"""

from itertools import combinations

import numpy as np


def sga_stream(c, eta, pi_max):
    c = np.ascontiguousarray(c, dtype=np.float64)
    n, s = c.shape
    pi = np.zeros(s)
    acc = np.zeros(s)
    for t in range(n):
        acc += pi
        # x_k = 1 iff c_k - pi_k < 0, so the subgradient is 1/2 - x_k
        g = np.where(c[t] - pi < 0.0, -0.5, 0.5)
        pi = np.clip(pi + eta * g, 0.0, pi_max)
    return acc / n


def erm_ascent(c, step_scale, pi_max, n_iters):
    c = np.ascontiguousarray(c, dtype=np.float64)
    n, s = c.shape
    pi = np.zeros(s)
    best = pi.copy()
    best_val = -np.inf
    for t in range(1, n_iters + 1):
        half = 0.5 * pi
        val = float(np.minimum(half, c - half).sum() / n)
        grad = 0.5 - np.count_nonzero(c - pi < 0.0, axis=0) / n
        if val > best_val:
            best_val = val
            best = pi.copy()
        eta = step_scale / np.sqrt(t)
        pi = np.clip(pi + eta * grad, 0.0, pi_max)
    return best, best_val


def _ball_masks(s, r):
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


def greedy_packing(s, d):
    size = 1 << s
    alive = np.ones(size, dtype=bool)
    masks = _ball_masks(s, d - 1)
    kept = []
    block = 1 << 16
    for start in range(0, size, block):
        for off in np.flatnonzero(alive[start : start + block]):
            idx = start + int(off)
            if alive[idx]:
                kept.append(idx)
                alive[np.uint32(idx) ^ masks] = False
    return np.asarray(kept, dtype=np.uint32)
