"""Signal and measurement domain model.

Spike trains with real ordered nodes, their band-limited Fourier samples,
power moments, the node scaling transform, and clustered-configuration
generation/validation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateSignalError, InfeasibleGeometryError, PositivityError

TWO_PI = 2.0 * np.pi

# Stream tags for the counter-based generator: one tag per random purpose so
# the same trial seed never reuses draws across purposes.
AMPLITUDE_STREAM = 0
SHIFT_STREAM = 1
EPSILON_STREAM = 2
NOISE_STREAM = 3

_MASK64 = (1 << 64) - 1


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream); pure function of its inputs."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SpikeSignal:
    """A finite sum of point masses a_j * delta(x - x_j) with x_1 < ... < x_d.

    ``positive`` is True only when every amplitude is real and strictly
    positive (declared membership in the positive signal class).
    """

    nodes: np.ndarray
    amplitudes: np.ndarray
    positive: bool = False

    @property
    def d(self) -> int:
        return len(self.nodes)

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))
        self.nodes.setflags(write=False)
        self.amplitudes.setflags(write=False)


def make_signal(amplitudes, nodes, require_positive: bool = False) -> SpikeSignal:
    """Build a SpikeSignal, sorting nodes ascending with amplitudes in lockstep.

    Raises DegenerateSignalError on duplicate nodes and PositivityError when
    ``require_positive`` is set but some amplitude is not a positive real.
    """
    a = np.asarray(amplitudes, dtype=complex)
    x = np.asarray(nodes, dtype=float)
    if a.ndim != 1 or x.ndim != 1 or len(a) != len(x) or len(x) == 0:
        raise DegenerateSignalError(
            f"need equal-length nonempty sequences, got {len(a)} amplitudes / {len(x)} nodes"
        )
    order = np.argsort(x, kind="stable")
    x = x[order]
    a = a[order]
    if np.any(np.diff(x) <= 0.0):
        raise DegenerateSignalError("degenerate signal: duplicate nodes")
    if require_positive:
        if np.any(a.imag != 0.0) or np.any(a.real <= 0.0):
            raise PositivityError("positive amplitudes required, got a non-positive entry")
    return SpikeSignal(nodes=x, amplitudes=a, positive=bool(require_positive))


def fourier_at(signal: SpikeSignal, s):
    """Fourier transform of the spike train at frequency s (scalar or array).

    Evaluates sum_j a_j exp(-2*pi*i * x_j * s).
    """
    s_arr = np.asarray(s, dtype=float)
    phases = np.exp(-2j * np.pi * np.outer(s_arr.ravel(), signal.nodes))
    values = phases @ signal.amplitudes
    if s_arr.ndim == 0:
        return complex(values[0])
    return values.reshape(s_arr.shape)


def moments(signal: SpikeSignal, k_max: int) -> np.ndarray:
    """Power moments m_k = sum_j a_j x_j^k for k = 0..k_max."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    powers = np.vander(signal.nodes, N=k_max + 1, increasing=True)
    return powers.T @ signal.amplitudes


def scale_signal(signal: SpikeSignal, T: float) -> SpikeSignal:
    """Scaling transform: nodes divided by T, amplitudes unchanged."""
    if T <= 0:
        raise ValueError("scale factor must be positive")
    return SpikeSignal(signal.nodes / T, signal.amplitudes, signal.positive)


def shift_signal(signal: SpikeSignal, delta: float) -> SpikeSignal:
    """Translate all nodes by delta; amplitudes unchanged."""
    return SpikeSignal(signal.nodes + delta, signal.amplitudes, signal.positive)


@dataclass(frozen=True)
class ClusterSpec:
    """Geometry of a (p, h, T, tau, eta)-clustered configuration.

    ``kappa`` is the 1-based index of the first cluster node; ``m_lower`` and
    ``M_upper`` bound the amplitudes drawn for generated signals.
    """

    d: int
    p: int
    h: float
    T: float
    tau: float
    eta: float
    kappa: int = 1
    m_lower: float = 1.0
    M_upper: float = 1.0

    def __post_init__(self):
        if not (2 <= self.p <= self.d):
            raise InfeasibleGeometryError(f"need 2 <= p <= d, got p={self.p}, d={self.d}")
        if not (0.0 < self.h <= self.T):
            raise InfeasibleGeometryError(f"need 0 < h <= T, got h={self.h}, T={self.T}")
        if not (0.0 < self.tau <= 1.0):
            raise InfeasibleGeometryError(f"need 0 < tau <= 1, got tau={self.tau}")
        if not (0.0 < self.eta <= 1.0):
            raise InfeasibleGeometryError(f"need 0 < eta <= 1, got eta={self.eta}")
        if not (1 <= self.kappa <= self.d - self.p + 1):
            raise InfeasibleGeometryError(
                f"need 1 <= kappa <= d-p+1, got kappa={self.kappa} with d={self.d}, p={self.p}"
            )
        if not (0.0 < self.m_lower <= self.M_upper):
            raise InfeasibleGeometryError(
                f"need 0 < m_lower <= M_upper, got {self.m_lower}, {self.M_upper}"
            )

    def cluster_slice(self) -> slice:
        """0-based slice selecting the cluster nodes."""
        return slice(self.kappa - 1, self.kappa - 1 + self.p)


@dataclass(frozen=True)
class MeasurementGrid:
    """Equispaced frequencies omega_1 = -Omega, ..., omega_N = +Omega."""

    omega_max: float
    n_samples: int

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        if self.n_samples < 3:
            raise ValueError("need at least 3 samples")

    @property
    def spacing(self) -> float:
        return 2.0 * self.omega_max / (self.n_samples - 1)

    @property
    def unambiguous_limit(self) -> float:
        """Node magnitudes below this bound are alias-free for this grid."""
        return 1.0 / (2.0 * self.spacing)

    def omegas(self) -> np.ndarray:
        return np.linspace(-self.omega_max, self.omega_max, self.n_samples)


@dataclass(frozen=True)
class Measurement:
    """Complex Fourier samples on a grid together with the noise budget."""

    grid: MeasurementGrid
    values: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if len(vals) != self.grid.n_samples:
            raise ValueError("values length must match grid.n_samples")
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)


def sample_measurement(
    signal: SpikeSignal,
    grid: MeasurementGrid,
    epsilon: float = 0.0,
    noise_mode: str = "none",
    seed: int = 0,
    noise_callback: Callable[[np.ndarray], np.ndarray] | None = None,
) -> Measurement:
    """Sample the signal's Fourier transform on the grid, optionally with noise.

    noise_mode:
      - "none": exact samples, recorded epsilon is the given budget.
      - "uniform_complex_disk": i.i.d. perturbations uniform on the complex
        disk of radius epsilon; deterministic given ``seed``.
      - "adversarial_callback": perturbation values from ``noise_callback``
        evaluated on the grid; must respect max |e| <= epsilon.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    omegas = grid.omegas()
    clean = fourier_at(signal, omegas)
    if noise_mode == "none":
        noise = np.zeros_like(clean)
    elif noise_mode == "uniform_complex_disk":
        rng = rng_stream(seed, NOISE_STREAM)
        radius = epsilon * np.sqrt(rng.uniform(size=grid.n_samples))
        angle = rng.uniform(0.0, TWO_PI, size=grid.n_samples)
        noise = radius * np.exp(1j * angle)
    elif noise_mode == "adversarial_callback":
        if noise_callback is None:
            raise ValueError("adversarial_callback mode needs a noise_callback")
        noise = np.asarray(noise_callback(omegas), dtype=complex)
        if noise.shape != omegas.shape:
            raise ValueError("noise_callback must return one value per grid point")
        if np.max(np.abs(noise)) > epsilon * (1.0 + 1e-12) + 1e-300:
            raise ValueError("noise_callback exceeds the sup-norm budget epsilon")
    else:
        raise ValueError(f"unknown noise_mode {noise_mode!r}")
    return Measurement(grid=grid, values=clean + noise, epsilon=float(epsilon))


@dataclass(frozen=True)
class ClusterReport:
    """Validation outcome for a node vector against a ClusterSpec."""

    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_cluster(nodes, spec: ClusterSpec) -> ClusterReport:
    """Check both clustered-configuration conditions for the kappa-indexed cluster.

    Condition (i): every cluster pair satisfies tau*h <= |x_j - x_k| <= h.
    Condition (ii): every (non-cluster, other) pair satisfies
    eta*T <= |x_l - x_j| <= T.
    """
    x = np.asarray(nodes, dtype=float)
    if len(x) != spec.d:
        return ClusterReport(False, [f"expected {spec.d} nodes, got {len(x)}"])
    if np.any(np.diff(x) <= 0.0):
        return ClusterReport(False, ["nodes not strictly increasing"])
    cl = spec.cluster_slice()
    cluster_idx = set(range(cl.start, cl.stop))
    violations = []
    lo_i, hi_i = spec.tau * spec.h, spec.h
    for j in sorted(cluster_idx):
        for k in sorted(cluster_idx):
            if k <= j:
                continue
            gap = abs(x[k] - x[j])
            if gap < lo_i * (1.0 - 1e-12):
                violations.append(
                    f"condition (i): |x{k + 1}-x{j + 1}| = {gap:.6g} < tau*h = {lo_i:.6g}"
                )
            if gap > hi_i * (1.0 + 1e-12):
                violations.append(
                    f"condition (i): |x{k + 1}-x{j + 1}| = {gap:.6g} > h = {hi_i:.6g}"
                )
    lo_ii, hi_ii = spec.eta * spec.T, spec.T
    for ell in range(spec.d):
        if ell in cluster_idx:
            continue
        for j in range(spec.d):
            if j == ell:
                continue
            gap = abs(x[ell] - x[j])
            if gap < lo_ii * (1.0 - 1e-12):
                violations.append(
                    f"condition (ii): |x{ell + 1}-x{j + 1}| = {gap:.6g} < eta*T = {lo_ii:.6g}"
                )
            if gap > hi_ii * (1.0 + 1e-12):
                violations.append(
                    f"condition (ii): |x{ell + 1}-x{j + 1}| = {gap:.6g} > T = {hi_ii:.6g}"
                )
    return ClusterReport(not violations, violations)


def cluster_nodes(spec: ClusterSpec, centered: bool = False) -> np.ndarray:
    """Node layout for the spec.

    Cluster nodes sit at 0, tau*h, ..., (p-1)*tau*h. The d-p remaining nodes
    occupy midpoints of equal partitions of the band of width T-(p-1)*tau*h,
    split below/above the cluster so that kappa-1 of them come first. The
    midpoint rule keeps every non-cluster node strictly inside its cell, so
    the total span stays below T.
    """
    step = spec.tau * spec.h
    cluster = step * np.arange(spec.p)
    hi = (spec.p - 1) * step
    n_rest = spec.d - spec.p
    before = spec.kappa - 1
    after = n_rest - before
    band = spec.T - hi
    w_below = band * before / n_rest if n_rest else 0.0
    w_above = band * after / n_rest if n_rest else 0.0
    below = -w_below + w_below * (np.arange(before) + 0.5) / before if before else np.empty(0)
    above = hi + w_above * (np.arange(after) + 0.5) / after if after else np.empty(0)
    nodes = np.concatenate([below, cluster, above])
    if centered:
        cl = spec.cluster_slice()
        nodes = nodes - 0.5 * (nodes[cl.start] + nodes[cl.stop - 1])
    return nodes


def make_cluster_signal(
    spec: ClusterSpec,
    amplitude_source: str = "uniform",
    seed: int = 0,
    amplitudes: Sequence[float] | None = None,
    centered: bool = False,
) -> SpikeSignal:
    """Generate a positive clustered signal satisfying the spec.

    amplitude_source "uniform" draws amplitudes i.i.d. uniform in
    [m_lower, M_upper] from the seeded stream; "fixed" takes the provided
    ``amplitudes``. Raises InfeasibleGeometryError (naming the violated
    inequality) when the layout cannot satisfy the clustered configuration.
    """
    nodes = cluster_nodes(spec, centered=centered)
    report = validate_cluster(nodes, spec)
    if not report.ok:
        raise InfeasibleGeometryError(
            "cluster geometry infeasible: " + "; ".join(report.violations)
        )
    if amplitude_source == "uniform":
        rng = rng_stream(seed, AMPLITUDE_STREAM)
        amps = rng.uniform(spec.m_lower, spec.M_upper, size=spec.d)
    elif amplitude_source == "fixed":
        if amplitudes is None or len(amplitudes) != spec.d:
            raise ValueError("fixed amplitude_source needs d amplitudes")
        amps = np.asarray(amplitudes, dtype=float)
    else:
        raise ValueError(f"unknown amplitude_source {amplitude_source!r}")
    return make_signal(amps, nodes, require_positive=True)
