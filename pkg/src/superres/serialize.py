"""JSON serialization for the domain types.

Field names are part of the external contract: signals use
{"nodes", "amplitudes_re", "amplitudes_im", "positive"} and grids use
{"omega", "n"}. Floats pass through ``repr`` (shortest round-trip form).
"""
from __future__ import annotations

import json

import numpy as np

from .adversarial import AdversarialPair
from .model import ClusterSpec, Measurement, MeasurementGrid, SpikeSignal, make_signal
from .oracle import DiameterEstimate
from .pencil import RecoveryResult


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def signal_to_dict(signal: SpikeSignal) -> dict:
    return {
        "nodes": _floats(signal.nodes),
        "amplitudes_re": _floats(signal.amplitudes.real),
        "amplitudes_im": _floats(signal.amplitudes.imag),
        "positive": bool(signal.positive),
    }


def signal_from_dict(data: dict) -> SpikeSignal:
    amps = np.asarray(data["amplitudes_re"], dtype=float) + 1j * np.asarray(
        data["amplitudes_im"], dtype=float
    )
    return make_signal(amps, data["nodes"], require_positive=bool(data["positive"]))


def grid_to_dict(grid: MeasurementGrid) -> dict:
    return {"omega": float(grid.omega_max), "n": int(grid.n_samples)}


def grid_from_dict(data: dict) -> MeasurementGrid:
    return MeasurementGrid(omega_max=float(data["omega"]), n_samples=int(data["n"]))


def spec_to_dict(spec: ClusterSpec) -> dict:
    return {
        "d": spec.d, "p": spec.p, "h": float(spec.h), "T": float(spec.T),
        "tau": float(spec.tau), "eta": float(spec.eta), "kappa": spec.kappa,
        "m_lower": float(spec.m_lower), "M_upper": float(spec.M_upper),
    }


def spec_from_dict(data: dict) -> ClusterSpec:
    return ClusterSpec(
        d=int(data["d"]), p=int(data["p"]), h=float(data["h"]), T=float(data["T"]),
        tau=float(data["tau"]), eta=float(data["eta"]), kappa=int(data.get("kappa", 1)),
        m_lower=float(data.get("m_lower", 1.0)), M_upper=float(data.get("M_upper", 1.0)),
    )


def measurement_to_dict(measurement: Measurement) -> dict:
    return {
        "grid": grid_to_dict(measurement.grid),
        "values_re": _floats(measurement.values.real),
        "values_im": _floats(measurement.values.imag),
        "epsilon": float(measurement.epsilon),
    }


def measurement_from_dict(data: dict) -> Measurement:
    values = np.asarray(data["values_re"], dtype=float) + 1j * np.asarray(
        data["values_im"], dtype=float
    )
    return Measurement(
        grid=grid_from_dict(data["grid"]), values=values, epsilon=float(data["epsilon"])
    )


def recovery_to_dict(result: RecoveryResult) -> dict:
    return {
        "estimate": signal_to_dict(result.estimate),
        "pencil_eigenvalues_re": _floats(result.pencil_eigenvalues.real),
        "pencil_eigenvalues_im": _floats(result.pencil_eigenvalues.imag),
        "singular_values_upper": _floats(result.singular_values_upper),
        "singular_values_lower": _floats(result.singular_values_lower),
        "lsq_residual": float(result.lsq_residual),
        "condition_hint": float(result.condition_hint),
    }


def pair_to_dict(pair: AdversarialPair) -> dict:
    return {
        "original": signal_to_dict(pair.original),
        "perturbed": signal_to_dict(pair.perturbed),
        "epsilon": pair.epsilon,
        "epsilon_tilde": pair.epsilon_tilde,
        "sup_norm_achieved": pair.sup_norm_achieved,
        "moment_residuals": _floats(pair.moment_residuals),
        "moment_shift": pair.moment_shift,
        "displacement_x": pair.displacement_x,
        "displacement_a": pair.displacement_a,
        "interleaving": bool(pair.interleaving),
        "positive": bool(pair.perturbed.positive),
        "omega": pair.omega,
        "p": pair.p,
        "kappa": pair.kappa,
        "grid_density": pair.grid_density,
    }


def diameters_to_dict(est: DiameterEstimate) -> dict:
    return {
        "per_node_diam": _floats(est.per_node_diam),
        "per_amp_diam": _floats(est.per_amp_diam),
        "grid_resolution": est.grid_resolution,
        "amp_halfwidths": _floats(est.amp_halfwidths),
        "node_halfwidths": _floats(est.node_halfwidths),
        "feasible_count": est.feasible_count,
        "epsilon": est.epsilon,
        "s_samples": est.s_samples,
    }


def dump_json(data: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
