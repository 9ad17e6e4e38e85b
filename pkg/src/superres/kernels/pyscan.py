"""Pure-numpy scan kernels (fallback backend).

Same contract as the compiled ``cyscan`` module: candidates are evaluated
against a reference spectrum on a frequency grid, and feasibility reductions
are folded in place so chunk merging stays an associative min/max + sum.
"""
from __future__ import annotations

import numpy as np


def sup_fourier_diff(amps, nodes, ref, s_grid) -> float:
    """max_k | sum_j amps[j] exp(-2i*pi*nodes[j]*s_k) - ref[k] | for real amps."""
    phases = np.exp(-2j * np.pi * np.outer(np.asarray(s_grid, float), np.asarray(nodes, float)))
    diff = phases @ np.asarray(amps, float) - np.asarray(ref, complex)
    return float(np.max(np.abs(diff)))


def feasible_scan(
    amp_combos: np.ndarray,
    node_combos: np.ndarray,
    ref: np.ndarray,
    s_grid: np.ndarray,
    eps_tol: float,
    amp_min: np.ndarray,
    amp_max: np.ndarray,
    node_min: np.ndarray,
    node_max: np.ndarray,
) -> int:
    """Scan candidate (amplitude, node) combinations for spectral feasibility.

    A candidate with amplitude row a and node row x is feasible when
    max_k |sum_j a[j] exp(-2i*pi*x[j]*s_k) - ref[k]| <= eps_tol. Coordinate
    extremes of feasible candidates are folded into the provided min/max
    arrays in place; returns the number of feasible candidates.
    """
    amp_combos = np.ascontiguousarray(amp_combos, dtype=float)
    node_combos = np.ascontiguousarray(node_combos, dtype=float)
    ref = np.asarray(ref, dtype=complex)
    s_grid = np.asarray(s_grid, dtype=float)
    count = 0
    for row in range(node_combos.shape[0]):
        phases = np.exp(-2j * np.pi * np.outer(node_combos[row], s_grid))
        diff = amp_combos @ phases - ref
        feasible = np.max(np.abs(diff), axis=1) <= eps_tol
        n_row = int(np.count_nonzero(feasible))
        if n_row == 0:
            continue
        count += n_row
        hits = amp_combos[feasible]
        np.minimum(amp_min, hits.min(axis=0), out=amp_min)
        np.maximum(amp_max, hits.max(axis=0), out=amp_max)
        np.minimum(node_min, node_combos[row], out=node_min)
        np.maximum(node_max, node_combos[row], out=node_max)
    return count
