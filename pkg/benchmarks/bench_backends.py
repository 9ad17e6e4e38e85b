#!/usr/bin/env python3
"""Benchmark the scan-kernel backends (compiled Cython vs pure numpy).

The feasibility scan is the hot loop of the brute-force oracle: every
(amplitude, node) candidate is tested against the reference spectrum on an
s-grid. The compiled kernel additionally exits a candidate early at the
first violated frequency. Run:

    python3 benchmarks/bench_backends.py [--resolution N] [--repeats K]
"""
import argparse
import time

import numpy as np

import superres.kernels as kernels
from superres.model import fourier_at, make_signal


def oracle_workload(resolution: int):
    """d=2 oracle-style candidate grids around a clustered signal."""
    signal = make_signal([1.0, 1.0], [-0.05, 0.05], require_positive=True)
    n_pts = resolution if resolution % 2 == 1 else resolution + 1
    amp_axes = [a + np.linspace(-0.3, 0.3, n_pts) for a in signal.amplitudes.real]
    node_axes = [x + np.linspace(-0.02, 0.02, n_pts) for x in signal.nodes]
    amp_combos = np.stack(
        [g.ravel() for g in np.meshgrid(*amp_axes, indexing="ij")], axis=-1
    )
    node_combos = np.stack(
        [g.ravel() for g in np.meshgrid(*node_axes, indexing="ij")], axis=-1
    )
    node_combos = node_combos[node_combos[:, 1] - node_combos[:, 0] > 0.0]
    s_grid = np.linspace(-10.0, 10.0, 64)
    ref = fourier_at(signal, s_grid)
    order = np.argsort(-np.abs(s_grid), kind="stable")
    return amp_combos, node_combos, ref[order], s_grid[order]


def time_feasible_scan(mod, workload, eps, repeats):
    amp, nod, ref, s = workload
    best = np.inf
    count = None
    for _ in range(repeats):
        a_min = np.full(2, np.inf)
        a_max = np.full(2, -np.inf)
        x_min = np.full(2, np.inf)
        x_max = np.full(2, -np.inf)
        t0 = time.perf_counter()
        count = mod.feasible_scan(amp, nod, ref, s, eps, a_min, a_max, x_min, x_max)
        best = min(best, time.perf_counter() - t0)
    return best, count


def time_sup_diff(mod, repeats):
    rng = np.random.default_rng(0)
    amps = np.ascontiguousarray(rng.uniform(0.5, 2.0, 8))
    nodes = np.ascontiguousarray(np.sort(rng.uniform(-0.5, 0.5, 8)))
    s = np.linspace(-10, 10, 2048)
    ref = np.ascontiguousarray(np.zeros(2048, complex))
    best = np.inf
    for _ in range(max(repeats * 20, 20)):
        t0 = time.perf_counter()
        mod.sup_fourier_diff(amps, nodes, ref, s)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=40,
                        help="points per coordinate axis (default 40)")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"active backend: {kernels.backend_name()}")
    if "compiled" not in backends:
        print("compiled backend not built; showing python results only")

    workload = oracle_workload(args.resolution)
    amp, nod, _, s = workload
    n_cand = amp.shape[0] * nod.shape[0]
    print(f"\nfeasible_scan: {amp.shape[0]} amp-combos x {nod.shape[0]} "
          f"node-combos = {n_cand:,} candidates, {len(s)} frequencies")
    eps = 0.05
    rows = {}
    for name, mod in sorted(backends.items()):
        elapsed, count = time_feasible_scan(mod, workload, eps, args.repeats)
        rows[name] = elapsed
        rate = n_cand / elapsed / 1e6
        print(f"  {name:9s} {elapsed * 1e3:10.1f} ms   {rate:8.2f} M candidates/s"
              f"   ({count} feasible)")
    if len(rows) == 2:
        print(f"  speedup: {rows['python'] / rows['compiled']:.1f}x")

    print("\nsup_fourier_diff: 8 spikes on a 2048-point certificate grid")
    micro = {}
    for name, mod in sorted(backends.items()):
        elapsed = time_sup_diff(mod, args.repeats)
        micro[name] = elapsed
        print(f"  {name:9s} {elapsed * 1e6:10.1f} us")
    if len(micro) == 2:
        print(f"  speedup: {micro['python'] / micro['compiled']:.1f}x")


if __name__ == "__main__":
    main()
