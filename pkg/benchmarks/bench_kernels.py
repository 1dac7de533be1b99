"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the three hot kernels (streaming subgradient ascent, ERM ascent,
greedy code packing) through both backends and reports wall-clock times
plus the observed agreement between the two implementations.

Usage:
    python3 benchmarks/bench_kernels.py [--sga-rows N] [--erm-iters T] [--packing-s S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lagrelax import _core_py

try:
    from lagrelax import _core
except ImportError:
    _core = None


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sga(n_rows: int, s: int = 8) -> None:
    rng = np.random.default_rng(12345)
    c = np.where(rng.random((n_rows, s)) < 0.6, 2.0, 1.0)
    eta = 3.0 / (2.0 * np.sqrt(n_rows))
    t_py, pi_py = _time(_core_py.sga_stream, c, eta, 3.0)
    print(f"sga_stream      rows={n_rows:<8d} python  {t_py * 1e3:9.2f} ms")
    if _core is not None:
        t_cy, pi_cy = _time(_core.sga_stream, c, eta, 3.0)
        same = np.array_equal(pi_py, pi_cy)
        print(
            f"sga_stream      rows={n_rows:<8d} cython  {t_cy * 1e3:9.2f} ms"
            f"  speedup {t_py / t_cy:6.1f}x  bitwise_equal={same}"
        )


def bench_erm(n_iters: int, n_rows: int = 400, s: int = 8) -> None:
    rng = np.random.default_rng(54321)
    c = np.where(rng.random((n_rows, s)) < 0.6, 2.0, 1.0)
    t_py, (pi_py, val_py) = _time(_core_py.erm_ascent, c, 1.5, 3.0, n_iters)
    print(f"erm_ascent      iters={n_iters:<7d} python  {t_py * 1e3:9.2f} ms")
    if _core is not None:
        t_cy, (pi_cy, val_cy) = _time(_core.erm_ascent, c, 1.5, 3.0, n_iters)
        print(
            f"erm_ascent      iters={n_iters:<7d} cython  {t_cy * 1e3:9.2f} ms"
            f"  speedup {t_py / t_cy:6.1f}x  pi_equal={np.array_equal(pi_py, pi_cy)}"
            f"  |dval|={abs(val_py - val_cy):.2e}"
        )


def bench_packing(s: int) -> None:
    d = -(-s // 8)
    t_py, codes_py = _time(_core_py.greedy_packing, s, d, repeats=1)
    print(f"greedy_packing  s={s:<11d} python  {t_py * 1e3:9.2f} ms  M={codes_py.size}")
    if _core is not None:
        t_cy, codes_cy = _time(_core.greedy_packing, s, d, repeats=1)
        same = np.array_equal(codes_py, codes_cy)
        print(
            f"greedy_packing  s={s:<11d} cython  {t_cy * 1e3:9.2f} ms"
            f"  speedup {t_py / t_cy:6.1f}x  bitwise_equal={same}"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sga-rows", type=int, default=200_000)
    parser.add_argument("--erm-iters", type=int, default=20_000)
    parser.add_argument("--packing-s", type=int, default=20)
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not available; benchmarking fallback only")
    bench_sga(args.sga_rows)
    bench_erm(args.erm_iters)
    bench_packing(args.packing_s)


if __name__ == "__main__":
    main()
