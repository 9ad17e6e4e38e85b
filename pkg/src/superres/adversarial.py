"""Worst-case witnesses: moment-matched positive pairs and their certificates.

A perturbed cluster keeps the first 2p-1 power moments of the original and
shifts the (2p-1)-th by a calibrated amount; non-cluster nodes get explicit
amplitude/position shifts. The combined pair is certified against the
Fourier sup-norm budget on a dense verification grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateSignalError,
    InfeasibleGeometryError,
    PositivityError,
    RegimeExceededError,
)
from .model import ClusterSpec, SpikeSignal, make_signal, moments, validate_cluster

PRONY_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class AdversarialPair:
    """A signal, its moment-matched perturbation, and the certificate data."""

    original: SpikeSignal
    perturbed: SpikeSignal
    epsilon: float
    epsilon_tilde: float
    sup_norm_achieved: float
    moment_residuals: np.ndarray
    moment_shift: float
    displacement_x: float
    displacement_a: float
    interleaving: bool
    omega: float
    p: int
    kappa: int
    grid_density: int

    @property
    def cluster_slice(self) -> slice:
        return slice(self.kappa - 1, self.kappa - 1 + self.p)


def lagrange_row(t_list, t: float) -> np.ndarray:
    """Row of the inverse-Vandermonde action: entry j is
    prod_{q != j} (t - t_q) / (t_j - t_q)."""
    t_list = np.asarray(t_list, dtype=float)
    k = len(t_list)
    if k == 0:
        raise ValueError("need at least one interpolation point")
    diffs = t_list[:, None] - t_list[None, :]
    if np.any(diffs[~np.eye(k, dtype=bool)] == 0.0):
        raise DegenerateSignalError("duplicate interpolation points")
    row = np.empty(k)
    for j in range(k):
        mask = np.arange(k) != j
        row[j] = np.prod((t - t_list[mask]) / (t_list[j] - t_list[mask]))
    return row


def prony_from_moments(mu) -> SpikeSignal:
    """Recover the p-spike signal matching the 2p given power moments.

    Solves the Hankel system for the Prony polynomial, takes its roots as
    nodes, then solves the (2p) x p Vandermonde system for the amplitudes.
    Raises RegimeExceededError when no real p-spike attains the moments
    (complex or repeated roots, or an inaccurate reconstruction).
    """
    mu = np.asarray(mu, dtype=float)
    if len(mu) < 2 or len(mu) % 2 != 0:
        raise ValueError("need an even number of moments (2p)")
    p = len(mu) // 2
    h0 = mu[np.add.outer(np.arange(p), np.arange(p))]
    try:
        coeffs = np.linalg.solve(h0, -mu[p:])
    except np.linalg.LinAlgError as exc:
        raise DegenerateSignalError("singular moment matrix: no unique p-spike") from exc
    roots = np.roots(np.concatenate([[1.0], coeffs[::-1]]))
    if np.any(roots.imag != 0.0):
        raise RegimeExceededError(
            "perturbation too large: no real p-spike attains these moments"
        )
    nodes = np.sort(roots.real)
    scale = max(1.0, float(np.max(np.abs(nodes))))
    if p > 1 and np.min(np.diff(nodes)) <= 1e-14 * scale:
        raise RegimeExceededError(
            "perturbation too large: no real p-spike attains these moments (repeated roots)"
        )
    powers = np.vander(nodes, N=2 * p, increasing=True).T
    b, *_ = np.linalg.lstsq(powers, mu, rcond=None)
    attained = powers @ b
    tol = PRONY_RESIDUAL_TOL * np.maximum(1.0, np.abs(mu))
    if np.any(np.abs(attained - mu) > tol):
        raise RegimeExceededError("moment reconstruction residual too large")
    positive = bool(np.all(b > 0.0))
    return make_signal(b, nodes, require_positive=positive)


def perturb_cluster(cluster: SpikeSignal, epsilon_tilde: float, omega: float) -> SpikeSignal:
    """Moment-matched perturbation of a positive cluster.

    The cluster is centered internally, blown up by omega, its (2p-1)-th
    moment shifted by epsilon_tilde, reconstructed, unscaled, and un-centered.
    The first 2p-1 moments are preserved exactly up to working precision.
    """
    if cluster.d < 2:
        raise RegimeExceededError("cluster perturbation needs p >= 2 spikes")
    if not cluster.positive:
        raise PositivityError("cluster perturbation needs a positive signal")
    p = cluster.d
    center = 0.5 * (cluster.nodes[0] + cluster.nodes[-1])
    blown = make_signal(
        cluster.amplitudes.real, (cluster.nodes - center) * omega, require_positive=True
    )
    mu = moments(blown, 2 * p - 1).real.copy()
    mu[-1] += epsilon_tilde
    try:
        reconstructed = prony_from_moments(mu)
    except RegimeExceededError as exc:
        raise RegimeExceededError(
            f"epsilon_tilde exceeds constructible regime: {exc}"
        ) from exc
    if not reconstructed.positive:
        raise RegimeExceededError(
            "epsilon_tilde exceeds constructible regime: positivity lost"
        )
    return make_signal(
        reconstructed.amplitudes.real,
        reconstructed.nodes / omega + center,
        require_positive=True,
    )


def shift_noncluster(
    noncluster: SpikeSignal, epsilon: float, omega: float, m_upper: float, d: int, p: int
) -> SpikeSignal:
    """Explicit worst-case shift of the well-separated nodes.

    Each amplitude grows by epsilon/(4(d-p)) and each node moves by
    epsilon/(8*pi*omega*M*(d-p)); the Fourier difference stays below
    epsilon/2 on [-omega, omega].
    """
    if d <= p:
        raise InfeasibleGeometryError("no non-cluster part (d = p)")
    if not noncluster.positive:
        raise PositivityError("non-cluster shift needs a positive signal")
    amp_shift = epsilon / (4.0 * (d - p))
    node_shift = epsilon / (8.0 * np.pi * omega * m_upper * (d - p))
    return make_signal(
        noncluster.amplitudes.real + amp_shift,
        noncluster.nodes + node_shift,
        require_positive=True,
    )


def interleaves(x, y) -> bool:
    """True when the sorted union of the two node sets strictly alternates."""
    tagged = sorted([(float(v), 0) for v in x] + [(float(w), 1) for w in y])
    labels = [t for _, t in tagged]
    return all(a != b for a, b in zip(labels, labels[1:]))


def _signed_sup_diff(sig_a: SpikeSignal, sig_b: SpikeSignal, s_grid: np.ndarray) -> float:
    amps = np.concatenate([sig_a.amplitudes.real, -sig_b.amplitudes.real])
    nodes = np.concatenate([sig_a.nodes, sig_b.nodes])
    return kernels.sup_fourier_diff(amps, nodes, np.zeros(len(s_grid), complex), s_grid)


def split_parts(signal: SpikeSignal, spec: ClusterSpec):
    """(cluster part, non-cluster part or None) of a clustered signal."""
    if np.any(signal.amplitudes.imag != 0.0) or np.any(signal.amplitudes.real <= 0.0):
        raise PositivityError("adversarial construction needs a positive signal")
    cl = spec.cluster_slice()
    mask = np.zeros(signal.d, dtype=bool)
    mask[cl] = True
    cluster = make_signal(
        signal.amplitudes[mask].real, signal.nodes[mask], require_positive=True
    )
    if np.all(mask):
        return cluster, None
    rest = make_signal(
        signal.amplitudes[~mask].real, signal.nodes[~mask], require_positive=True
    )
    return cluster, rest


def build_adversarial_pair(
    signal: SpikeSignal,
    spec: ClusterSpec,
    epsilon: float,
    omega: float,
    grid_density: int = 2048,
    max_halvings: int = 60,
) -> AdversarialPair:
    """Assemble the full worst-case pair for a clustered positive signal.

    The non-cluster part gets the explicit shift with budget epsilon/2; the
    cluster moment shift starts at epsilon and is halved until the cluster
    Fourier difference fits within epsilon/2 on the verification grid.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    report = validate_cluster(signal.nodes, spec)
    if not report.ok:
        raise InfeasibleGeometryError(
            "signal does not match the cluster spec: " + "; ".join(report.violations)
        )
    if signal.d != spec.d:
        raise InfeasibleGeometryError("signal size does not match spec.d")
    cluster, rest = split_parts(signal, spec)
    s_grid = np.linspace(-omega, omega, grid_density)

    rest_eps = None
    if rest is not None:
        rest_eps = shift_noncluster(rest, epsilon, omega, spec.M_upper, spec.d, spec.p)

    eps_tilde = float(epsilon)
    cluster_eps = None
    for _ in range(max_halvings + 1):
        try:
            candidate = perturb_cluster(cluster, eps_tilde, omega)
        except RegimeExceededError:
            eps_tilde *= 0.5
            continue
        if _signed_sup_diff(candidate, cluster, s_grid) <= 0.5 * epsilon:
            cluster_eps = candidate
            break
        eps_tilde *= 0.5
    if cluster_eps is None:
        raise RegimeExceededError("no admissible ε̃ found")

    if rest_eps is None:
        perturbed = cluster_eps
    else:
        perturbed = make_signal(
            np.concatenate([cluster_eps.amplitudes.real, rest_eps.amplitudes.real]),
            np.concatenate([cluster_eps.nodes, rest_eps.nodes]),
            require_positive=True,
        )

    sup_norm = _signed_sup_diff(perturbed, signal, s_grid)
    if sup_norm > epsilon:
        raise RegimeExceededError(
            f"certificate failed: sup-norm {sup_norm:.3e} exceeds epsilon {epsilon:.3e}"
        )

    p = spec.p
    center = 0.5 * (cluster.nodes[0] + cluster.nodes[-1])
    mu_orig = moments(
        make_signal(cluster.amplitudes.real, (cluster.nodes - center) * omega), 2 * p - 1
    ).real
    mu_pert = moments(
        make_signal(cluster_eps.amplitudes.real, (cluster_eps.nodes - center) * omega),
        2 * p - 1,
    ).real
    # residuals reported in original coordinates: blown moments scale by omega^k
    scale_back = omega ** (-np.arange(2 * p, dtype=float))
    residuals = np.abs(mu_pert - mu_orig) * scale_back
    moment_shift = float(mu_pert[-1] - mu_orig[-1])

    return AdversarialPair(
        original=signal,
        perturbed=perturbed,
        epsilon=float(epsilon),
        epsilon_tilde=eps_tilde,
        sup_norm_achieved=float(sup_norm),
        moment_residuals=residuals[: 2 * p - 1],
        moment_shift=moment_shift,
        displacement_x=float(np.max(np.abs(perturbed.nodes - signal.nodes))),
        displacement_a=float(
            np.max(np.abs(perturbed.amplitudes.real - signal.amplitudes.real))
        ),
        interleaving=interleaves(cluster.nodes, cluster_eps.nodes),
        omega=float(omega),
        p=p,
        kappa=spec.kappa,
        grid_density=int(grid_density),
    )


@dataclass(frozen=True)
class TaylorReport:
    """Outcome of the higher-moment domination check on a constructed pair."""

    checked: int
    violations: list
    r_value: float
    skipped: bool = False
    note: str = ""


def taylor_domination_check(pair: AdversarialPair, k_max: int) -> TaylorReport:
    """Verify |m_k(H)| R^k <= (2ek/2p)^(2p) * max_{l<2p} |m_l(H)| R^l for the
    blown-up cluster difference H, for every k in [2p, k_max]."""
    p = pair.p
    if k_max < 2 * p:
        raise ValueError("k_max must be at least 2p")
    cl = pair.cluster_slice
    x_orig = pair.original.nodes[cl]
    x_pert = pair.perturbed.nodes[cl]
    a_orig = pair.original.amplitudes.real[cl]
    a_pert = pair.perturbed.amplitudes.real[cl]
    center = 0.5 * (x_orig[0] + x_orig[-1])
    t = np.concatenate([(x_pert - center), (x_orig - center)]) * pair.omega
    beta = np.concatenate([a_pert, -a_orig])
    if np.any(t == 0.0):
        return TaylorReport(0, [], float("nan"), skipped=True,
                            note="a node of the difference sits at 0; R undefined")
    r_value = 1.0 / float(np.max(np.abs(t)))
    powers = np.vander(t, N=k_max + 1, increasing=True).T  # row k = t^k
    m = powers @ beta
    weights = r_value ** np.arange(k_max + 1)
    base = float(np.max(np.abs(m[: 2 * p]) * weights[: 2 * p]))
    violations = []
    for k in range(2 * p, k_max + 1):
        lhs = abs(m[k]) * weights[k]
        bound = (2.0 * np.e * k / (2.0 * p)) ** (2 * p) * base
        if lhs > bound * (1.0 + 1e-12):
            violations.append((k, float(lhs), float(bound)))
    return TaylorReport(checked=k_max - 2 * p + 1, violations=violations, r_value=r_value)
