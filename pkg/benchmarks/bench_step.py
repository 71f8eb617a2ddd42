"""Benchmark the implicit-midpoint step: compiled kernel vs numpy fallback.

Run as: python benchmarks/bench_step.py [num_nodes ...]
"""

import sys
import time

import numpy as np

from quadnls.grid import RadialGrid
from quadnls._kernels import fallback

try:
    from quadnls._kernels import _midpoint as compiled
except ImportError:
    compiled = None


def make_problem(num_nodes):
    grid = RadialGrid(5, 16.0, num_nodes)
    r = grid.nodes
    u = (3.0 * np.exp(-(r**2))).astype(complex)
    v = (2.5 * np.exp(-(r**2))).astype(complex)
    lower, diag, upper = grid.laplacian_diagonals()
    return grid, u, v, lower, diag, upper


def run(stepper, num_nodes, n_steps=400, dt=1e-3):
    grid, u, v, lower, diag, upper = make_problem(num_nodes)
    tol = 1e-12 * np.sqrt(np.dot(grid.weights, np.abs(u) ** 2))
    t0 = time.perf_counter()
    for _ in range(n_steps):
        u, v, iters, ok = stepper(u, v, lower, diag, upper, grid.weights,
                                  dt, 0.5, tol, 100)
        assert ok
    elapsed = time.perf_counter() - t0
    return n_steps / elapsed, u, v


def main():
    sizes = [int(s) for s in sys.argv[1:]] or [512, 2048, 8192]
    print(f"{'nodes':>8} {'python steps/s':>16} {'cython steps/s':>16} {'speedup':>9}")
    for num_nodes in sizes:
        py_rate, u_py, v_py = run(fallback.midpoint_step, num_nodes)
        if compiled is None:
            print(f"{num_nodes:>8} {py_rate:>16.1f} {'(not built)':>16} {'-':>9}")
            continue
        cy_rate, u_cy, v_cy = run(compiled.midpoint_step, num_nodes)
        agree = max(np.max(np.abs(u_py - u_cy)), np.max(np.abs(v_py - v_cy)))
        print(f"{num_nodes:>8} {py_rate:>16.1f} {cy_rate:>16.1f} "
              f"{cy_rate / py_rate:>8.1f}x   (lane mismatch {agree:.1e})")


if __name__ == "__main__":
    main()
