# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the sequential hot loops.

Kept in lockstep with ``_core_py`` (the numpy fallback): ``sga_stream`` and
``greedy_packing`` must produce bit-identical output on both backends, which
is why the build disables fused multiply-add. ``erm_ascent`` walks an
identical iterate path but accumulates its objective value in a different
order, so its value matches the fallback only to float-reduction precision.
"""

from itertools import combinations

import numpy as np

from libc.math cimport INFINITY, sqrt


def sga_stream(double[:, ::1] c, double eta, double pi_max):
    """Projected stream recursion over the rows of ``c`` (restricted
    instances, dualized right-hand side 1/2); returns the average of the
    pre-update iterates."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t s = c.shape[1]
    pi_arr = np.zeros(s, dtype=np.float64)
    acc_arr = np.zeros(s, dtype=np.float64)
    cdef double[::1] pi = pi_arr
    cdef double[::1] acc = acc_arr
    cdef Py_ssize_t t, k
    cdef double g, v
    for t in range(n):
        for k in range(s):
            acc[k] += pi[k]
            # x_k = 1 iff c_k - pi_k < 0, so the subgradient is 1/2 - x_k
            if c[t, k] - pi[k] < 0.0:
                g = -0.5
            else:
                g = 0.5
            v = pi[k] + eta * g
            if v < 0.0:
                v = 0.0
            elif v > pi_max:
                v = pi_max
            pi[k] = v
    for k in range(s):
        acc[k] /= n
    return acc_arr


def erm_ascent(double[:, ::1] c, double step_scale, double pi_max, Py_ssize_t n_iters):
    """Maximize (1/n) sum_i sum_k min(pi_k/2, c_ik - pi_k/2) over the box
    [0, pi_max]^s by projected subgradient ascent with step
    step_scale/sqrt(t), returning the best-value iterate and its value."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t s = c.shape[1]
    pi_arr = np.zeros(s, dtype=np.float64)
    best_arr = np.zeros(s, dtype=np.float64)
    grad_arr = np.empty(s, dtype=np.float64)
    cdef double[::1] pi = pi_arr
    cdef double[::1] best = best_arr
    cdef double[::1] grad = grad_arr
    cdef double best_val = -INFINITY
    cdef Py_ssize_t t, i, k
    cdef long cnt
    cdef double val, half, term, eta, v
    for t in range(1, n_iters + 1):
        val = 0.0
        for k in range(s):
            half = 0.5 * pi[k]
            cnt = 0
            for i in range(n):
                term = c[i, k] - half
                if term < half:
                    val += term
                else:
                    val += half
                if c[i, k] - pi[k] < 0.0:
                    cnt += 1
            grad[k] = 0.5 - (<double>cnt) / (<double>n)
        val /= n
        if val > best_val:
            best_val = val
            for k in range(s):
                best[k] = pi[k]
        eta = step_scale / sqrt(<double>t)
        for k in range(s):
            v = pi[k] + eta * grad[k]
            if v < 0.0:
                v = 0.0
            elif v > pi_max:
                v = pi_max
            pi[k] = v
    return best_arr, best_val


def _ball_masks(int s, int r):
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


def greedy_packing(int s, int d):
    """First-fit packing of {0,1}^s in ascending integer order: keep a
    point iff its Hamming distance to every kept point is >= d. Returns
    the kept points as uint32 bit codes (bit k = coordinate k)."""
    cdef Py_ssize_t size = (<Py_ssize_t>1) << s
    alive_arr = np.ones(size, dtype=np.uint8)
    cdef unsigned char[::1] alive = alive_arr
    masks_arr = _ball_masks(s, d - 1)
    cdef unsigned int[::1] masks = masks_arr
    cdef Py_ssize_t n_masks = masks_arr.shape[0]
    out_arr = np.empty(size, dtype=np.uint32)
    cdef unsigned int[::1] out = out_arr
    cdef Py_ssize_t idx, j, m
    cdef unsigned int code
    m = 0
    for idx in range(size):
        if alive[idx]:
            code = <unsigned int>idx
            out[m] = code
            m += 1
            for j in range(n_masks):
                alive[code ^ masks[j]] = 0
    return out_arr[:m].copy()
