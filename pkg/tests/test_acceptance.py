"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside the pytest verdicts.
"""
import time

import numpy as np
import pytest

from superres.adversarial import build_adversarial_pair, taylor_domination_check
from superres.experiments import (
    ExperimentConfig,
    fit_slope,
    run_sweep,
    summarize_amplification,
)
from superres.model import (
    ClusterSpec,
    MeasurementGrid,
    make_signal,
    sample_measurement,
    scale_signal,
)
from superres.oracle import error_set_diameters
from superres.pencil import recover


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")


# ---------------------------------------------------------------- criterion 1

def test_criterion_1_noiseless_exactness(random_signal_factory):
    omega, n_samples = 10.0, 33
    grid = MeasurementGrid(omega, n_samples)
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst_x = worst_a = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 6))
        sig = random_signal_factory(rng, d, omega)
        res = recover(sample_measurement(sig, grid), d)
        worst_x = max(worst_x, float(np.max(np.abs(res.estimate.nodes - sig.nodes))) * omega)
        worst_a = max(worst_a, float(np.max(np.abs(
            res.estimate.amplitudes.real - sig.amplitudes.real))))
    elapsed = time.perf_counter() - start
    ok = worst_x < 1e-6 and worst_a < 1e-6 and elapsed < 2.0
    _report("criterion 1 (noiseless exactness)", ok,
            f"max|dx|*Omega={worst_x:.3e}, max|da|={worst_a:.3e}, {elapsed:.2f}s")
    assert worst_x < 1e-6
    assert worst_a < 1e-6
    assert elapsed < 2.0


# ---------------------------------------------------------------- criterion 2

def test_criterion_2_figure1_scaling_laws():
    spec = ClusterSpec(d=3, p=2, h=0.01, T=0.3, tau=0.4, eta=0.15, kappa=1,
                       m_lower=1.0, M_upper=2.0)
    config = ExperimentConfig(
        spec=spec, omega=20.0, n_samples=33,
        epsilon_rule="rate_bound", rate_coeff=0.1, rate_floor_div=100.0,
        n_trials=300, srf_sweep=(2, 2.8, 4, 5.7, 8, 11, 16),
        base_seed=1000, shift_halfwidth=0.02,
    )
    start = time.perf_counter()
    datasets = run_sweep(config)
    summary = summarize_amplification(datasets)
    elapsed = time.perf_counter() - start
    kx, ka = summary.cluster_kx_slope, summary.cluster_ka_slope
    nc_kx, nc_ka = summary.noncluster_max_kx, summary.noncluster_max_ka
    ok = (1.65 <= kx <= 2.35 and 2.65 <= ka <= 3.35
          and nc_kx <= 50 and nc_ka <= 50 and elapsed < 300.0)
    _report("criterion 2 (Figure 1 scaling laws)", ok,
            f"cluster slopes Kx={kx:.3f} (target 2), Ka={ka:.3f} (target 3), "
            f"noncluster max Kx={nc_kx:.2f} Ka={nc_ka:.2f}, {elapsed:.1f}s")
    assert 1.65 <= kx <= 2.35
    assert 2.65 <= ka <= 3.35
    assert nc_kx <= 50 and nc_ka <= 50
    assert elapsed < 300.0


# ----------------------------------------------------- criteria 3, 4 and 7

OMEGA_PAIRS = 10.0
EPSILON_PAIRS = 1e-5
H_SWEEP = tuple(np.array([0.02, 0.04, 0.08, 0.16]) * (2.0 / OMEGA_PAIRS))


@pytest.fixture(scope="module")
def h_sweep_pairs():
    pairs = []
    for h in H_SWEEP:
        sig = make_signal([1.0, 1.0], [-h / 2, h / 2], require_positive=True)
        spec = ClusterSpec(d=2, p=2, h=h, T=1.0, tau=1.0, eta=0.5, kappa=1,
                           m_lower=0.5, M_upper=2.0)
        pairs.append(build_adversarial_pair(
            sig, spec, EPSILON_PAIRS, OMEGA_PAIRS, grid_density=2048))
    return pairs


def test_criterion_3_adversarial_certificates(h_sweep_pairs):
    start = time.perf_counter()
    worst_resid = worst_shift_rel = worst_sup_excess = 0.0
    all_positive = all_interleaved = True
    for pair in h_sweep_pairs:
        m_ref = np.abs(np.array(
            [np.sum(pair.original.amplitudes.real * pair.original.nodes**k)
             for k in range(2 * pair.p - 1)]))
        scale = np.maximum(1.0, m_ref)
        worst_resid = max(worst_resid, float(np.max(pair.moment_residuals / scale)))
        worst_shift_rel = max(worst_shift_rel, abs(
            pair.moment_shift - pair.epsilon_tilde) / pair.epsilon_tilde)
        worst_sup_excess = max(worst_sup_excess,
                               pair.sup_norm_achieved - pair.epsilon)
        all_positive &= bool(pair.perturbed.positive) and bool(
            np.all(pair.perturbed.amplitudes.real > 0))
        all_interleaved &= pair.interleaving
    elapsed = time.perf_counter() - start
    ok = (worst_resid <= 1e-9 and worst_shift_rel <= 1e-8
          and worst_sup_excess <= 0.0 and all_positive and all_interleaved
          and elapsed < 10.0)
    _report("criterion 3 (adversarial pair certificate)", ok,
            f"max resid={worst_resid:.2e}, shift rel err={worst_shift_rel:.2e}, "
            f"sup-norm margin ok={worst_sup_excess <= 0}, positive={all_positive}, "
            f"interleaved={all_interleaved}, {elapsed:.2f}s")
    assert worst_resid <= 1e-9
    assert worst_shift_rel <= 1e-8
    assert worst_sup_excess <= 0.0
    assert all_positive and all_interleaved
    assert elapsed < 10.0


def test_criterion_4_lower_bound_exponents(h_sweep_pairs):
    start = time.perf_counter()
    hs = list(H_SWEEP)
    slope_x, _, _ = fit_slope(list(zip(hs, [p.displacement_x for p in h_sweep_pairs])))
    slope_a, _, _ = fit_slope(list(zip(hs, [p.displacement_a for p in h_sweep_pairs])))
    elapsed = time.perf_counter() - start
    ok = -2.3 <= slope_x <= -1.7 and -3.3 <= slope_a <= -2.7 and elapsed < 10.0
    _report("criterion 4 (lower-bound exponents)", ok,
            f"displacement slopes x={slope_x:.3f} (target -2), "
            f"a={slope_a:.3f} (target -3), {elapsed:.2f}s")
    assert -2.3 <= slope_x <= -1.7
    assert -3.3 <= slope_a <= -2.7
    assert elapsed < 10.0


def test_criterion_7_taylor_domination(h_sweep_pairs):
    total_violations = 0
    checked = 0
    for pair in h_sweep_pairs:
        report = taylor_domination_check(pair, 40)
        assert not report.skipped
        total_violations += len(report.violations)
        checked += report.checked
    ok = total_violations == 0
    _report("criterion 7 (Taylor domination)", ok,
            f"{checked} inequalities checked across {len(h_sweep_pairs)} pairs, "
            f"{total_violations} violations")
    assert total_violations == 0


# ---------------------------------------------------------------- criterion 5

def test_criterion_5_oracle_consistency():
    start = time.perf_counter()
    single = make_signal([1.0], [0.0], require_positive=True)
    eps_sweep = [0.02, 0.04, 0.08, 0.16]
    box = [0.5, 0.028]
    diams = [error_set_diameters(single, eps, 1.0, box, grid_resolution=60)
             for eps in eps_sweep]
    node_slope, _, _ = fit_slope(list(zip(eps_sweep, [d.per_node_diam[0] for d in diams])))
    amp_slope, _, _ = fit_slope(list(zip(eps_sweep, [d.per_amp_diam[0] for d in diams])))
    at_01 = error_set_diameters(single, 0.1, 1.0, box, grid_resolution=60)
    amp_01 = float(at_01.per_amp_diam[0])

    # d=2 positive-cluster micro-instance: the constructed perturbation is a
    # feasible point of the error set, so the oracle spread must cover it
    sig2 = make_signal([1.0, 1.0], [-0.05, 0.05], require_positive=True)
    spec2 = ClusterSpec(d=2, p=2, h=0.1, T=1.0, tau=1.0, eta=0.5, kappa=1,
                        m_lower=0.5, M_upper=2.0)
    eps2, omega2 = 1e-5, 10.0
    pair = build_adversarial_pair(sig2, spec2, eps2, omega2, grid_density=2048)
    est2 = error_set_diameters(
        sig2, eps2, omega2,
        box_halfwidths=[2e-5, 2e-5, 2e-6, 2e-6],
        grid_resolution=20, s_samples=64,
    )
    node_disp = np.abs(pair.perturbed.nodes - pair.original.nodes)
    amp_disp = np.abs(pair.perturbed.amplitudes.real - pair.original.amplitudes.real)
    node_ok = bool(np.all(node_disp <= est2.per_node_diam + est2.node_cells))
    amp_ok = bool(np.all(amp_disp <= est2.per_amp_diam + est2.amp_cells))
    elapsed = time.perf_counter() - start
    ok = (0.8 <= node_slope <= 1.2 and 0.8 <= amp_slope <= 1.2
          and 0.18 <= amp_01 <= 0.22 and node_ok and amp_ok and elapsed < 60.0)
    _report("criterion 5 (oracle consistency)", ok,
            f"slopes node={node_slope:.3f} amp={amp_slope:.3f} (target 1), "
            f"amp diam @0.1={amp_01:.4f}, constructor within oracle: "
            f"nodes={node_ok} amps={amp_ok}, {elapsed:.1f}s")
    assert 0.8 <= node_slope <= 1.2
    assert 0.8 <= amp_slope <= 1.2
    assert 0.18 <= amp_01 <= 0.22
    assert node_ok and amp_ok
    assert elapsed < 60.0


# ---------------------------------------------------------------- criterion 6

def test_criterion_6_scale_identity():
    single = make_signal([1.0], [0.0], require_positive=True)
    eps, omega, res = 0.1, 1.0, 60
    base = error_set_diameters(single, eps, omega, [0.5, 0.028], grid_resolution=res)
    worst_node_cells = worst_amp_cells = 0.0
    for T in (0.5, 2.0):
        scaled = scale_signal(single, T)
        est = error_set_diameters(
            scaled, eps, omega * T, [0.5, 0.028 / T], grid_resolution=res
        )
        node_gap = abs(T * est.per_node_diam[0] - base.per_node_diam[0])
        amp_gap = abs(est.per_amp_diam[0] - base.per_amp_diam[0])
        worst_node_cells = max(worst_node_cells, node_gap / base.node_cells[0])
        worst_amp_cells = max(worst_amp_cells, amp_gap / base.amp_cells[0])
    ok = worst_node_cells <= 2.0 and worst_amp_cells <= 2.0
    _report("criterion 6 (scale identity)", ok,
            f"max deviation: node={worst_node_cells:.2f} cells, "
            f"amp={worst_amp_cells:.2f} cells (limit 2)")
    assert worst_node_cells <= 2.0
    assert worst_amp_cells <= 2.0
