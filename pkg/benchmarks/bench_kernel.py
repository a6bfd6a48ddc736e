"""Benchmark: compiled extension vs pure-Python fallback on the hot kernels.

Usage: python3 benchmarks/bench_kernel.py [--runs 200] [--horizon 500] [--n 4]

Times (a) MARE value iteration to convergence and (b) the closed-loop path
simulator, on a scalar plant and on a random stable n-dimensional plant.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from swiptlqg import _kernels_py

try:
    from swiptlqg import _kernels
except ImportError:
    _kernels = None


def _random_plant(n, rng):
    A = rng.standard_normal((n, n))
    A *= 1.1 / max(abs(np.linalg.eigvals(A)))  # mildly unstable
    B = rng.standard_normal((n, n))
    C = np.eye(n)
    Q = np.eye(n)
    R = np.eye(n)
    W = np.eye(n)
    U = np.eye(n)
    return A, B, C, Q, R, W, U


def bench_mare(mod, A, B, W, U, eta, repeats):
    S0 = np.ascontiguousarray(W)
    t0 = time.perf_counter()
    for _ in range(repeats):
        S, iters, status, res = mod.mare_fixed_point(
            A, B, W, U, eta, S0, 1e-10, 100_000, 1e12
        )
    dt = (time.perf_counter() - t0) / repeats
    return dt, iters, status


def bench_sim(mod, plant, runs, T, rng):
    A, B, C, Q, R, W, U = plant
    n = A.shape[0]
    S, _, _, _ = _kernels_py.mare_fixed_point(A, B, W, U, 0.9, W, 1e-10, 100_000, 1e12)
    L = -np.linalg.solve(B.T @ S @ B + U, B.T @ S @ A)
    t0 = time.perf_counter()
    for _ in range(runs):
        x0 = rng.standard_normal(n)
        w = rng.standard_normal((T, n))
        v = rng.standard_normal((T, n))
        eb = (rng.random(T) < 0.9).astype(np.int8)
        gb = (rng.random(T) < 0.7).astype(np.int8)
        mod.simulate_path(
            A, B, C, Q, R, W, U, np.ascontiguousarray(L),
            x0, np.zeros(n), np.eye(n), w, v, eb, gb, 1e150,
        )
    return (time.perf_counter() - t0) / runs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--horizon", type=int, default=500)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=50)
    args = ap.parse_args()

    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return

    rng = np.random.default_rng(0)
    plant = _random_plant(args.n, rng)
    A, B, C, Q, R, W, U = plant
    eta = 0.9

    print(f"plant dimension n={args.n}, horizon T={args.horizon}, "
          f"{args.runs} sim runs, {args.repeats} MARE repeats\n")

    dt_c, it_c, _ = bench_mare(_kernels, A, B, W, U, eta, args.repeats)
    dt_p, it_p, _ = bench_mare(_kernels_py, A, B, W, U, eta, args.repeats)
    assert it_c == it_p
    print(f"mare_fixed_point   compiled {dt_c * 1e3:9.3f} ms   "
          f"pure-python {dt_p * 1e3:9.3f} ms   speedup {dt_p / dt_c:6.1f}x"
          f"   ({it_c} iterations)")

    rng_c = np.random.default_rng(1)
    rng_p = np.random.default_rng(1)
    dt_c = bench_sim(_kernels, plant, args.runs, args.horizon, rng_c)
    dt_p = bench_sim(_kernels_py, plant, args.runs, args.horizon, rng_p)
    print(f"simulate_path      compiled {dt_c * 1e3:9.3f} ms   "
          f"pure-python {dt_p * 1e3:9.3f} ms   speedup {dt_p / dt_c:6.1f}x"
          f"   (per run of T={args.horizon})")


if __name__ == "__main__":
    main()
