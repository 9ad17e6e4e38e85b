"""Brute-force estimation of error-set projection diameters.

Candidate positive signals on a product grid around the reference are kept
when their Fourier transform stays within epsilon of the reference on a
frequency sample grid; reported diameters are per-coordinate spreads of the
feasible set (an inner approximation, hence a lower bound).
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PositivityError, ResolutionWarning
from .model import SpikeSignal, fourier_at

MAX_RESOLUTION = 80
MAX_DIMENSION = 2

# Keeps exact-boundary and center candidates feasible despite rounding; the
# scan then inner-approximates the epsilon*(1+1e-9) error set, which is
# indistinguishable at the tolerances used downstream.
RELATIVE_SLACK = 1e-9
ABSOLUTE_SLACK = 1e-12


@dataclass(frozen=True)
class DiameterEstimate:
    """Per-coordinate feasible spreads plus the grid bookkeeping."""

    per_node_diam: np.ndarray
    per_amp_diam: np.ndarray
    grid_resolution: int
    amp_halfwidths: np.ndarray
    node_halfwidths: np.ndarray
    feasible_count: int
    epsilon: float
    s_samples: int

    @property
    def node_cells(self) -> np.ndarray:
        return 2.0 * self.node_halfwidths / max(self.grid_resolution, 1)

    @property
    def amp_cells(self) -> np.ndarray:
        return 2.0 * self.amp_halfwidths / max(self.grid_resolution, 1)


def _resolve_box(box_halfwidths, d: int) -> tuple[np.ndarray, np.ndarray]:
    arr = np.atleast_1d(np.asarray(box_halfwidths, dtype=float))
    if arr.size == 1:
        amp_hw = np.full(d, arr[0])
        node_hw = np.full(d, arr[0])
    elif arr.size == 2:
        amp_hw = np.full(d, arr[0])
        node_hw = np.full(d, arr[1])
    elif arr.size == 2 * d:
        amp_hw = arr[:d].copy()
        node_hw = arr[d:].copy()
    else:
        raise ValueError(
            f"box_halfwidths needs 1, 2 or {2 * d} entries, got {arr.size}"
        )
    if np.any(amp_hw <= 0) or np.any(node_hw <= 0):
        raise ValueError("box halfwidths must be positive")
    return amp_hw, node_hw


def _axis(center: float, halfwidth: float, n_points: int) -> np.ndarray:
    return center + np.linspace(-halfwidth, halfwidth, n_points)


def _cartesian(axes: list[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def error_set_diameters(
    signal: SpikeSignal,
    epsilon: float,
    omega: float,
    box_halfwidths,
    grid_resolution: int = 40,
    s_samples: int = 64,
    workers: int = 1,
) -> DiameterEstimate:
    """Exhaustive per-coordinate diameters of the positive error set.

    ``box_halfwidths`` gives the search halfwidth per coordinate: a scalar,
    an (amplitude, node) pair, or all 2d values ordered amplitudes first.
    Candidates keep exactly d spikes, positive amplitudes, and node gaps of
    at least one grid cell.
    """
    d = signal.d
    if d > MAX_DIMENSION:
        raise ValueError(f"oracle brute force is limited to d <= {MAX_DIMENSION}")
    if grid_resolution > MAX_RESOLUTION:
        raise ValueError(f"grid_resolution is limited to {MAX_RESOLUTION}")
    if grid_resolution < 1:
        raise ValueError("grid_resolution must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if not signal.positive and (
        np.any(signal.amplitudes.imag != 0.0) or np.any(signal.amplitudes.real <= 0.0)
    ):
        raise PositivityError("oracle searches positive signals only")
    amp_hw, node_hw = _resolve_box(box_halfwidths, d)
    n_points = grid_resolution if grid_resolution % 2 == 1 else grid_resolution + 1

    amp_axes = [_axis(signal.amplitudes.real[j], amp_hw[j], n_points) for j in range(d)]
    amp_axes = [axis[axis > 0.0] for axis in amp_axes]
    if any(len(axis) == 0 for axis in amp_axes):
        raise ValueError("amplitude box excludes all positive values")
    node_axes = [_axis(signal.nodes[j], node_hw[j], n_points) for j in range(d)]

    amp_combos = _cartesian(amp_axes)
    node_combos = _cartesian(node_axes)
    if d > 1:
        min_gap = float(np.max(2.0 * node_hw / max(n_points - 1, 1)))
        gaps = np.diff(node_combos, axis=1)
        node_combos = node_combos[np.all(gaps >= min_gap * (1.0 - 1e-12), axis=1)]
        if node_combos.shape[0] == 0:
            raise ValueError(
                "node grid cell exceeds the reference node gaps; shrink the "
                "node box halfwidths or raise grid_resolution"
            )

    s_grid = np.linspace(-omega, omega, s_samples)
    ref = fourier_at(signal, s_grid)
    # large |s| first: the compiled kernel rejects infeasible candidates sooner
    order = np.argsort(-np.abs(s_grid), kind="stable")
    s_grid, ref = s_grid[order], ref[order]

    scale = float(np.sum(np.abs(signal.amplitudes)))
    eps_tol = epsilon * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK * max(1.0, scale)

    def scan(chunk: np.ndarray):
        amp_min = np.full(d, np.inf)
        amp_max = np.full(d, -np.inf)
        node_min = np.full(d, np.inf)
        node_max = np.full(d, -np.inf)
        count = kernels.feasible_scan(
            amp_combos, chunk, ref, s_grid, eps_tol, amp_min, amp_max, node_min, node_max
        )
        return count, amp_min, amp_max, node_min, node_max

    if workers > 1 and node_combos.shape[0] > 1:
        chunks = np.array_split(node_combos, min(workers * 4, node_combos.shape[0]))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(scan, chunks))
    else:
        results = [scan(node_combos)]

    count = sum(r[0] for r in results)
    amp_min = np.min([r[1] for r in results], axis=0)
    amp_max = np.max([r[2] for r in results], axis=0)
    node_min = np.min([r[3] for r in results], axis=0)
    node_max = np.max([r[4] for r in results], axis=0)

    if count == 0:
        raise ValueError(
            "no feasible candidate: the reference configuration fell off the "
            "search grid (check box_halfwidths against the node gaps)"
        )
    per_amp = np.maximum(amp_max - amp_min, 0.0)
    per_node = np.maximum(node_max - node_min, 0.0)
    if count == 1 and grid_resolution < 8:
        warnings.warn("resolution insufficient", ResolutionWarning, stacklevel=2)
    return DiameterEstimate(
        per_node_diam=per_node,
        per_amp_diam=per_amp,
        grid_resolution=grid_resolution,
        amp_halfwidths=amp_hw,
        node_halfwidths=node_hw,
        feasible_count=int(count),
        epsilon=float(epsilon),
        s_samples=int(s_samples),
    )


@dataclass(frozen=True)
class ScalingReport:
    """Diameter-versus-epsilon sweep with fitted log-log slopes."""

    eps_list: np.ndarray
    estimates: list
    node_slopes: np.ndarray
    amp_slopes: np.ndarray
    notes: list


def diameter_epsilon_scaling(
    signal: SpikeSignal, omega: float, eps_list, **oracle_kwargs
) -> ScalingReport:
    """Run the oracle across an increasing epsilon sweep and fit the slopes."""
    from .experiments import fit_slope

    eps_arr = np.asarray(eps_list, dtype=float)
    if len(eps_arr) < 2 or np.any(np.diff(eps_arr) <= 0):
        raise ValueError("eps_list must be increasing with at least two entries")
    estimates = [
        error_set_diameters(signal, eps, omega, **oracle_kwargs) for eps in eps_arr
    ]
    d = signal.d
    node_slopes = np.full(d, np.nan)
    amp_slopes = np.full(d, np.nan)
    notes = []
    for j in range(d):
        node_vals = np.array([est.per_node_diam[j] for est in estimates])
        amp_vals = np.array([est.per_amp_diam[j] for est in estimates])
        if np.all(node_vals > 0):
            node_slopes[j] = fit_slope(list(zip(eps_arr, node_vals)))[0]
        else:
            notes.append(f"node {j}: zero diameter in sweep, slope undefined")
        if np.all(amp_vals > 0):
            amp_slopes[j] = fit_slope(list(zip(eps_arr, amp_vals)))[0]
        else:
            notes.append(f"amplitude {j}: zero diameter in sweep, slope undefined")
    return ScalingReport(eps_arr, estimates, node_slopes, amp_slopes, notes)
