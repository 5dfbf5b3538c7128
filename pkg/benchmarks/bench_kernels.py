#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Workloads mirror real use: the resonance-integral inner sweep as driven by
the uniform-bound scan, and the Monte Carlo convolution membership count
at counterexample scale.  Run after building the extension:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from xsblab._kernels import _pybackend

try:
    from xsblab._kernels import _cykernels
except ImportError:
    _cykernels = None


def time_fn(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def sweep_workload(n=800, seed=0):
    rng = np.random.default_rng(seed)
    xi, y = 8.0, 64.0
    x1 = rng.uniform(-256, 256, n)
    A = -3.0 * (xi - x1)
    B = -3.0 * (xi - x1) ** 2
    C = y + 3.0 * xi * x1 * (xi - x1)
    off = np.vstack([xi - x1, x1, np.zeros(n)])
    slope = np.array([1.0, 0.0, 1.0])
    power = np.array([0.4, 0.4, 0.4])
    kind = np.array([0, 0, 0], dtype=np.int8)
    glx, glw = np.polynomial.legendre.leggauss(8)
    return (A, B, C, -256.0, 256.0, off, slope, power, kind, 1.4, glx, glw)


def conv_workload(n=1 << 16, m=1320, seed=1):
    rng = np.random.default_rng(seed)
    N, delta = 256.0, 256.0**-0.5
    xi1 = N + delta * rng.random(n)
    mu1 = -1 + 2 * rng.random(n)
    xi2 = N + delta * rng.random(n)
    mu2 = -1 + 2 * rng.random(n)
    xt = N + delta * rng.random(m)
    tt = xt**3 + rng.uniform(-4, 4, m)
    return (xi1, mu1, xi2, mu2, xt, tt, N, delta, 0.0, 1.0)


def run(name, py_fn, cy_fn, args):
    t_py, v_py = time_fn(py_fn, *args)
    print(f"{name:14s} python: {t_py * 1e3:9.2f} ms")
    if cy_fn is None:
        print(f"{name:14s} cython: (extension not built)")
        return
    t_cy, v_cy = time_fn(cy_fn, *args)
    v_py = np.asarray(v_py, dtype=float)
    v_cy = np.asarray(v_cy, dtype=float)
    rel = float(np.max(np.abs(v_py - v_cy) / np.maximum(np.abs(v_py), 1e-300)))
    print(f"{name:14s} cython: {t_cy * 1e3:9.2f} ms   speedup x{t_py / t_cy:5.1f}   max rel diff {rel:.1e}")


def main():
    print("kernel benchmark (best of 3)")
    run(
        "inner_sweep",
        _pybackend.inner_sweep,
        _cykernels.inner_sweep if _cykernels else None,
        sweep_workload(),
    )
    run(
        "conv_counts",
        _pybackend.conv_counts,
        _cykernels.conv_counts if _cykernels else None,
        conv_workload(),
    )
    # end-to-end: one uniform-bound point through whichever backend is active
    from xsblab import kernel_backend
    from xsblab.resonance import QuadSpec, eval_I_report

    t0 = time.perf_counter()
    rep = eval_I_report(8.0, 64.0, 0.2, 0.7, quad=QuadSpec(truncation_radius=512.0))
    dt = time.perf_counter() - t0
    print(f"eval_I point ({kernel_backend}): {dt * 1e3:.1f} ms, value {rep.value:.6g}")


if __name__ == "__main__":
    main()
