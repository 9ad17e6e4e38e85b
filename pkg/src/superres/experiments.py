"""Seeded random recovery trials and error-amplification summaries.

A trial draws a clustered positive signal, samples noisy Fourier data,
runs the Matrix Pencil recovery, gates per-node success on a third of the
minimal gap, and normalizes errors into amplification factors. Batches are
pure functions of (config, seed range); sweeps vary the cluster extent at
fixed cutoff so the super-resolution factor changes while the sampling
geometry stays put.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SuperresError
from .model import (
    EPSILON_STREAM,
    SHIFT_STREAM,
    ClusterSpec,
    MeasurementGrid,
    make_cluster_signal,
    rng_stream,
    sample_measurement,
    shift_signal,
)
from .pencil import recover

EPSILON_FLOOR = 1e-14


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved configuration of a trial batch.

    epsilon_rule "fixed" uses ``epsilon`` for every trial; "rate_bound" draws
    epsilon log-uniformly in [bound/rate_floor_div, bound] with
    bound = rate_coeff * (omega * tau * h)^(2p-1), which keeps every draw
    inside the scaling-law regime.
    """

    spec: ClusterSpec
    omega: float
    n_samples: int
    epsilon_rule: str = "rate_bound"
    epsilon: float = 1e-6
    rate_coeff: float = 0.1
    rate_floor_div: float = 100.0
    n_trials: int = 100
    srf_sweep: tuple = ()
    base_seed: int = 0
    shift_halfwidth: float = 0.0

    def __post_init__(self):
        if self.epsilon_rule not in ("fixed", "rate_bound"):
            raise ValueError(f"unknown epsilon_rule {self.epsilon_rule!r}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")

    @property
    def srf(self) -> float:
        """Super-resolution factor of the current spec: 1/(omega * tau * h)."""
        return 1.0 / (self.omega * self.spec.tau * self.spec.h)

    def rate_bound(self) -> float:
        return self.rate_coeff * (self.omega * self.spec.tau * self.spec.h) ** (
            2 * self.spec.p - 1
        )


def config_for_srf(config: ExperimentConfig, srf: float) -> ExperimentConfig:
    """Shrink the cluster extent so the configuration hits the requested SRF."""
    h = 1.0 / (config.omega * srf * config.spec.tau)
    return replace(config, spec=replace(config.spec, h=h))


@dataclass(frozen=True)
class TrialRecord:
    """Per-node outcome of one seeded experiment."""

    seed: int
    srf: float
    epsilon: float
    errors: np.ndarray
    succ: np.ndarray
    k_x: np.ndarray
    k_a: np.ndarray
    cluster_mask: np.ndarray
    failed: bool = False
    failure_msg: str = ""
    condition_hint: float = float("nan")
    lsq_residual: float = float("nan")


def trial_epsilon(config: ExperimentConfig, seed: int) -> float:
    if config.epsilon_rule == "fixed":
        return float(config.epsilon)
    bound = config.rate_bound()
    rng = rng_stream(seed, EPSILON_STREAM)
    return float(bound * math.exp(rng.uniform(-math.log(config.rate_floor_div), 0.0)))


def run_single_trial(config: ExperimentConfig, seed: int) -> TrialRecord:
    """One experiment: draw signal and noise from the seed, recover, grade."""
    spec = config.spec
    signal = make_cluster_signal(spec, "uniform", seed)
    if config.shift_halfwidth > 0.0:
        delta = rng_stream(seed, SHIFT_STREAM).uniform(
            -config.shift_halfwidth, config.shift_halfwidth
        )
        signal = shift_signal(signal, delta)
    epsilon = trial_epsilon(config, seed)
    grid = MeasurementGrid(config.omega, config.n_samples)
    measurement = sample_measurement(
        signal, grid, epsilon, noise_mode="uniform_complex_disk", seed=seed
    )
    cluster_mask = np.zeros(spec.d, dtype=bool)
    cluster_mask[spec.cluster_slice()] = True
    srf = config.srf
    nan = np.full(spec.d, np.nan)
    try:
        result = recover(measurement, spec.d)
    except SuperresError as exc:
        return TrialRecord(
            seed=seed, srf=srf, epsilon=epsilon,
            errors=nan.copy(), succ=np.zeros(spec.d, dtype=bool),
            k_x=nan.copy(), k_a=nan.copy(), cluster_mask=cluster_mask,
            failed=True, failure_msg=str(exc),
        )
    x_true = signal.nodes
    a_true = signal.amplitudes.real
    errors = np.abs(result.estimate.nodes - x_true)
    gaps = np.abs(x_true[:, None] - x_true[None, :])
    np.fill_diagonal(gaps, np.inf)
    succ = errors < gaps.min(axis=1) / 3.0
    eps_eff = max(epsilon, EPSILON_FLOOR)
    k_x = np.where(succ, errors * config.omega / eps_eff, np.nan)
    amp_errors = np.abs(a_true - result.estimate.amplitudes.real)
    k_a = np.where(succ, amp_errors / eps_eff, np.nan)
    return TrialRecord(
        seed=seed, srf=srf, epsilon=epsilon,
        errors=errors, succ=succ, k_x=k_x, k_a=k_a, cluster_mask=cluster_mask,
        condition_hint=result.condition_hint, lsq_residual=result.lsq_residual,
    )


def run_batch(config: ExperimentConfig, workers: int = 1) -> list[TrialRecord]:
    """Trials at seeds base_seed .. base_seed+n_trials-1, in seed order."""
    seeds = range(config.base_seed, config.base_seed + config.n_trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda s: run_single_trial(config, s), seeds))
    else:
        records = [run_single_trial(config, s) for s in seeds]
    return records


def run_sweep(config: ExperimentConfig, workers: int = 1) -> dict[float, list[TrialRecord]]:
    """run_batch at every SRF of config.srf_sweep (h shrinking, omega fixed)."""
    if not config.srf_sweep:
        raise ValueError("config.srf_sweep is empty")
    return {
        float(srf): run_batch(config_for_srf(config, srf), workers=workers)
        for srf in config.srf_sweep
    }


def success_rate(records: list[TrialRecord]) -> np.ndarray:
    """Per-node fraction of successful trials."""
    flags = np.stack([r.succ for r in records])
    return flags.mean(axis=0)


def fit_slope(points) -> tuple[float, float, float]:
    """Ordinary least squares in log-log space: (slope, intercept, r_squared)."""
    pts = [(float(x), float(y)) for x, y in points]
    xs = np.array([x for x, _ in pts])
    ys = np.array([y for _, y in pts])
    if len(set(xs.tolist())) < 2:
        raise ValueError("need at least two distinct abscissae")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive values")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


@dataclass(frozen=True)
class SummaryRow:
    srf: float
    node_class: str
    median_kx: float
    median_ka: float
    n_success: int


@dataclass(frozen=True)
class AmplificationSummary:
    """Quantile table per (SRF, node class) with cluster slopes attached."""

    rows: list
    quantile: float
    cluster_kx_slope: float = float("nan")
    cluster_ka_slope: float = float("nan")
    cluster_kx_intercept: float = float("nan")
    cluster_ka_intercept: float = float("nan")
    noncluster_max_kx: float = float("nan")
    noncluster_max_ka: float = float("nan")
    notes: list = field(default_factory=list)

    def cluster_rows(self):
        return [r for r in self.rows if r.node_class == "cluster"]


def summarize_amplification(
    datasets: dict[float, list[TrialRecord]], quantile: float = 0.5
) -> AmplificationSummary:
    """Per-SRF, per-node-class quantiles of the amplification factors.

    Only successful nodes of non-failed trials contribute. Cluster columns
    get fitted log-log slopes versus SRF; non-cluster columns report their
    maxima across the sweep.
    """
    if not 0.0 < quantile < 1.0:
        raise ValueError("quantile must be in (0, 1)")
    rows: list[SummaryRow] = []
    notes: list[str] = []
    for srf in sorted(datasets):
        records = datasets[srf]
        if not records:
            notes.append(f"SRF {srf:g}: empty dataset, omitted")
            continue
        if all(r.failed for r in records):
            notes.append(f"SRF {srf:g}: all trials failed, omitted")
            continue
        for cls in ("cluster", "noncluster"):
            kx_pool, ka_pool = [], []
            for rec in records:
                if rec.failed:
                    continue
                mask = rec.cluster_mask if cls == "cluster" else ~rec.cluster_mask
                ok = mask & rec.succ
                kx_pool.extend(rec.k_x[ok].tolist())
                ka_pool.extend(rec.k_a[ok].tolist())
            if cls == "noncluster" and not kx_pool and all(
                rec.cluster_mask.all() for rec in records
            ):
                continue  # pure-cluster configuration: no such class
            if not kx_pool:
                notes.append(f"SRF {srf:g}: no successful {cls} nodes, omitted")
                continue
            rows.append(
                SummaryRow(
                    srf=float(srf),
                    node_class=cls,
                    median_kx=float(np.quantile(kx_pool, quantile)),
                    median_ka=float(np.quantile(ka_pool, quantile)),
                    n_success=len(kx_pool),
                )
            )
    cluster = [r for r in rows if r.node_class == "cluster"]
    noncluster = [r for r in rows if r.node_class == "noncluster"]
    kx_slope = ka_slope = kx_int = ka_int = float("nan")
    if len(cluster) >= 2:
        try:
            kx_slope, kx_int, _ = fit_slope([(r.srf, r.median_kx) for r in cluster])
            ka_slope, ka_int, _ = fit_slope([(r.srf, r.median_ka) for r in cluster])
        except ValueError as exc:
            notes.append(f"cluster slope fit failed: {exc}")
    return AmplificationSummary(
        rows=rows,
        quantile=quantile,
        cluster_kx_slope=kx_slope,
        cluster_ka_slope=ka_slope,
        cluster_kx_intercept=kx_int,
        cluster_ka_intercept=ka_int,
        noncluster_max_kx=max((r.median_kx for r in noncluster), default=float("nan")),
        noncluster_max_ka=max((r.median_ka for r in noncluster), default=float("nan")),
        notes=notes,
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def trials_to_csv(records: list[TrialRecord], path) -> None:
    """One row per (trial, node): seed,srf,node_index,node_class,e_j,succ,K_x,K_a."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "srf", "node_index", "node_class", "e_j", "succ", "K_x", "K_a"])
        for rec in records:
            for j in range(len(rec.errors)):
                cls = "cluster" if rec.cluster_mask[j] else "noncluster"
                succ = bool(rec.succ[j]) and not rec.failed
                writer.writerow([
                    rec.seed,
                    _fmt(rec.srf),
                    j + 1,
                    cls,
                    "" if np.isnan(rec.errors[j]) else _fmt(rec.errors[j]),
                    "true" if succ else "false",
                    _fmt(rec.k_x[j]) if succ else "",
                    _fmt(rec.k_a[j]) if succ else "",
                ])


def summary_to_csv(summary: AmplificationSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["srf", "node_class", "median_Kx", "median_Ka", "n_success"])
        for row in summary.rows:
            writer.writerow([
                _fmt(row.srf), row.node_class,
                _fmt(row.median_kx), _fmt(row.median_ka), row.n_success,
            ])


def summarize_trial_csvs(paths, quantile: float = 0.5) -> AmplificationSummary:
    """Rebuild a summary from persisted per-trial CSV files."""
    datasets: dict[float, list[TrialRecord]] = {}
    for path in paths:
        per_seed: dict[int, dict] = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                seed = int(row["seed"])
                srf = float(row["srf"])
                entry = per_seed.setdefault(
                    seed, {"srf": srf, "cls": [], "succ": [], "kx": [], "ka": [], "err": []}
                )
                entry["cls"].append(row["node_class"] == "cluster")
                entry["succ"].append(row["succ"] == "true")
                entry["kx"].append(float(row["K_x"]) if row["K_x"] else np.nan)
                entry["ka"].append(float(row["K_a"]) if row["K_a"] else np.nan)
                entry["err"].append(float(row["e_j"]) if row["e_j"] else np.nan)
        for seed, entry in per_seed.items():
            rec = TrialRecord(
                seed=seed,
                srf=entry["srf"],
                epsilon=float("nan"),
                errors=np.array(entry["err"]),
                succ=np.array(entry["succ"]),
                k_x=np.array(entry["kx"]),
                k_a=np.array(entry["ka"]),
                cluster_mask=np.array(entry["cls"]),
            )
            datasets.setdefault(rec.srf, []).append(rec)
    for srf in datasets:
        datasets[srf].sort(key=lambda r: r.seed)
    return summarize_amplification(datasets, quantile=quantile)


def plot_amplification(summary: AmplificationSummary, which: str, path) -> None:
    """Self-contained SVG: log-log medians versus SRF with the fitted line."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if which not in ("x", "a"):
        raise ValueError("which must be 'x' or 'a'")
    pick = (lambda r: r.median_kx) if which == "x" else (lambda r: r.median_ka)
    slope = summary.cluster_kx_slope if which == "x" else summary.cluster_ka_slope
    intercept = (
        summary.cluster_kx_intercept if which == "x" else summary.cluster_ka_intercept
    )
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    cluster = summary.cluster_rows()
    if cluster:
        srfs = np.array([r.srf for r in cluster])
        vals = np.array([pick(r) for r in cluster])
        ax.loglog(srfs, vals, "o", color="tab:blue", label="cluster median")
        if np.isfinite(slope):
            line = np.exp(intercept) * srfs ** slope
            ax.loglog(srfs, line, "-", color="tab:blue", alpha=0.7,
                      label=f"fit slope {slope:.2f}")
    noncluster = [r for r in summary.rows if r.node_class == "noncluster"]
    if noncluster:
        ax.loglog([r.srf for r in noncluster], [pick(r) for r in noncluster],
                  "s", color="tab:orange", label="non-cluster median")
    ax.set_xlabel("SRF")
    ax.set_ylabel(r"$\mathcal{K}_{x}$" if which == "x" else r"$\mathcal{K}_{a}$")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
