"""Spike super-resolution laboratory.

Matrix Pencil recovery of positive point sources from band-limited Fourier
samples, worst-case moment-matched signal pairs, a brute-force error-set
oracle, and the seeded experiment harness for error-amplification scaling.
"""

__version__ = "0.1.0"

from .adversarial import (
    AdversarialPair,
    build_adversarial_pair,
    lagrange_row,
    perturb_cluster,
    prony_from_moments,
    shift_noncluster,
    taylor_domination_check,
)
from .errors import SuperresError
from .experiments import (
    ExperimentConfig,
    TrialRecord,
    fit_slope,
    run_batch,
    run_single_trial,
    run_sweep,
    summarize_amplification,
)
from .model import (
    ClusterSpec,
    Measurement,
    MeasurementGrid,
    SpikeSignal,
    fourier_at,
    make_cluster_signal,
    make_signal,
    moments,
    sample_measurement,
    scale_signal,
    shift_signal,
    validate_cluster,
)
from .oracle import DiameterEstimate, diameter_epsilon_scaling, error_set_diameters
from .pencil import (
    HankelPencil,
    RecoveryResult,
    build_hankel,
    estimate_amplitudes,
    nodes_from_eigenvalues,
    pencil_eigenvalues,
    recover,
    reduced_pencil,
)

__all__ = [
    "__version__",
    "SuperresError",
    "SpikeSignal", "ClusterSpec", "MeasurementGrid", "Measurement",
    "make_signal", "fourier_at", "moments", "scale_signal", "shift_signal",
    "sample_measurement", "make_cluster_signal", "validate_cluster",
    "HankelPencil", "RecoveryResult", "build_hankel", "reduced_pencil",
    "pencil_eigenvalues", "nodes_from_eigenvalues", "estimate_amplitudes", "recover",
    "AdversarialPair", "lagrange_row", "prony_from_moments", "perturb_cluster",
    "shift_noncluster", "build_adversarial_pair", "taylor_domination_check",
    "DiameterEstimate", "error_set_diameters", "diameter_epsilon_scaling",
    "ExperimentConfig", "TrialRecord", "run_single_trial", "run_batch",
    "run_sweep", "fit_slope", "summarize_amplification",
]
