"""Matrix Pencil recovery from equispaced Fourier samples.

Pipeline: Hankel assembly, order-d truncated SVDs of the upper/lower row
blocks, reduced pencil, generalized eigenvalues, node extraction from
eigenvalue arguments, Vandermonde least squares for the amplitudes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AliasingRangeWarning,
    PencilInversionError,
    RankDeficientPencilError,
    SuperresError,
    VandermondeError,
)
from .model import Measurement, MeasurementGrid, SpikeSignal, make_signal

RANK_FLOOR = 1e-13  # relative singular-value floor for the order-d truncation


@dataclass(frozen=True)
class HankelPencil:
    """(n_hat+1) x (n_hat+1) Hankel matrix H[i, j] = Y(omega_{i+j+1}), 1-based
    sample indexing, together with its upper/lower row blocks."""

    H: np.ndarray
    n_hat: int

    @property
    def H_u(self) -> np.ndarray:
        return self.H[:-1, :]

    @property
    def H_l(self) -> np.ndarray:
        return self.H[1:, :]


@dataclass(frozen=True)
class PencilDiagnostics:
    """Leading singular values (up to order d+1) of both row blocks."""

    singular_values_upper: np.ndarray
    singular_values_lower: np.ndarray

    def condition_hint(self, d: int) -> float:
        s = self.singular_values_upper
        if len(s) <= d:
            return float("inf")
        if s[d] == 0.0:
            return float("inf")
        return float(s[d - 1] / s[d])


@dataclass(frozen=True)
class RecoveryResult:
    """Matrix Pencil output with solver diagnostics."""

    estimate: SpikeSignal
    pencil_eigenvalues: np.ndarray
    singular_values_upper: np.ndarray
    singular_values_lower: np.ndarray
    lsq_residual: float
    condition_hint: float
    b_hat: np.ndarray = field(repr=False, default=None)


def build_hankel(measurement: Measurement) -> HankelPencil:
    """Assemble the square Hankel pencil from the first 2*n_hat+1 samples."""
    n = measurement.grid.n_samples
    if n < 3:
        raise RankDeficientPencilError("pencil needs at least one row (N >= 3)")
    n_hat = (n - 1) // 2
    y = measurement.values
    idx = np.arange(n_hat + 1)
    H = y[idx[:, None] + idx[None, :]]
    return HankelPencil(H=H, n_hat=n_hat)


def reduced_pencil(hp: HankelPencil, d: int):
    """Order-d reduction of the pencil (H_u, H_l) via truncated SVDs.

    Returns (H_u_reduced, H_l_reduced, PencilDiagnostics) where
    H_u_reduced = U2* U1 S1 V1* V2 and H_l_reduced = diag(s2[:d]).
    """
    if not (1 <= d <= hp.n_hat):
        raise RankDeficientPencilError(
            f"order d={d} outside valid range 1..{hp.n_hat}"
        )
    u1, s1, v1h = np.linalg.svd(hp.H_u, full_matrices=False)
    u2, s2, v2h = np.linalg.svd(hp.H_l, full_matrices=False)
    keep = min(d + 1, len(s1))
    diag = PencilDiagnostics(
        singular_values_upper=s1[:keep].copy(),
        singular_values_lower=s2[:keep].copy(),
    )
    if s2[d - 1] < RANK_FLOOR * s2[0]:
        raise RankDeficientPencilError(
            f"rank-deficient pencil: singular value {d} of the lower block below floor"
        )
    u1d, v1d = u1[:, :d], v1h[:d].conj().T
    u2d, v2d = u2[:, :d], v2h[:d].conj().T
    hu_red = (u2d.conj().T @ u1d) @ (s1[:d, None] * (v1d.conj().T @ v2d))
    hl_red = np.diag(s2[:d]).astype(complex)
    return hu_red, hl_red, diag


def pencil_eigenvalues(hu_red: np.ndarray, hl_red: np.ndarray) -> np.ndarray:
    """Eigenvalues z solving H_l_reduced v = z H_u_reduced v.

    Computed as the spectrum of H_u_reduced^{-1} H_l_reduced; in the
    noiseless case each eigenvalue equals exp(-2i*pi*x_j*h_omega).
    """
    try:
        return np.linalg.eigvals(np.linalg.solve(hu_red, hl_red))
    except np.linalg.LinAlgError as exc:
        raise PencilInversionError("pencil inversion failed") from exc


def nodes_from_eigenvalues(z: np.ndarray, grid: MeasurementGrid) -> np.ndarray:
    """Node positions -arg(z) / (2*pi*h_omega), sorted ascending.

    Warns with AliasingRangeWarning when a node lands at the boundary of the
    grid's unambiguous range.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) == 0.0):
        raise PencilInversionError("zero pencil eigenvalue has no node")
    nodes = -np.angle(z) / (2.0 * np.pi * grid.spacing)
    limit = grid.unambiguous_limit
    if np.any(np.abs(nodes) >= limit * (1.0 - 1e-6)):
        warnings.warn(
            "aliasing range exceeded: a node sits at the branch boundary",
            AliasingRangeWarning,
            stacklevel=2,
        )
    return np.sort(nodes)


def estimate_amplitudes(measurement: Measurement, nodes) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares Vandermonde fit of complex amplitudes at the given nodes.

    Returns (b_hat, a_hat, residual) with a_hat = |b_hat| and residual the
    l2 misfit of the fit.
    """
    nodes = np.asarray(nodes, dtype=float)
    if len(nodes) > 1 and np.min(np.diff(np.sort(nodes))) < 1e-12:
        raise VandermondeError("two nodes closer than 1e-12: Vandermonde rank-deficient")
    omegas = measurement.grid.omegas()
    V = np.exp(-2j * np.pi * np.outer(omegas, nodes))
    b_hat, *_ = np.linalg.lstsq(V, measurement.values, rcond=None)
    residual = float(np.linalg.norm(measurement.values - V @ b_hat))
    return b_hat, np.abs(b_hat), residual


def recover(measurement: Measurement, d: int) -> RecoveryResult:
    """Run the full Matrix Pencil pipeline for a known source count d."""

    def staged(stage, fn, *args):
        try:
            return fn(*args)
        except SuperresError as exc:
            raise type(exc)(f"{stage}: {exc}") from exc

    hp = staged("build_hankel", build_hankel, measurement)
    hu_red, hl_red, diag = staged("reduced_pencil", reduced_pencil, hp, d)
    z = staged("pencil_eigenvalues", pencil_eigenvalues, hu_red, hl_red)
    nodes = staged("nodes_from_eigenvalues", nodes_from_eigenvalues, z, measurement.grid)
    b_hat, a_hat, residual = staged("estimate_amplitudes", estimate_amplitudes, measurement, nodes)
    estimate = staged("estimate", make_signal, a_hat, nodes)
    return RecoveryResult(
        estimate=estimate,
        pencil_eigenvalues=z,
        singular_values_upper=diag.singular_values_upper,
        singular_values_lower=diag.singular_values_lower,
        lsq_residual=residual,
        condition_hint=diag.condition_hint(d),
        b_hat=b_hat,
    )
