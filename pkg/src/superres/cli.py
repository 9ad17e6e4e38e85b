"""Command-line surface: generate / sample / recover / adversarial / oracle /
experiment / report.

Every output file gets a sibling ``<name>.manifest.json`` (directory outputs
get ``manifest.json``) holding the fully resolved configuration; feeding a
manifest back through ``--config`` reproduces the outputs bit-exact apart
from the recorded duration.
"""
from __future__ import annotations

import argparse
import difflib
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .adversarial import build_adversarial_pair
from .errors import SuperresError
from .experiments import (
    ExperimentConfig,
    plot_amplification,
    run_sweep,
    summarize_amplification,
    summarize_trial_csvs,
    summary_to_csv,
    trials_to_csv,
)
from .model import ClusterSpec, MeasurementGrid, make_cluster_signal, sample_measurement
from .oracle import error_set_diameters
from .pencil import recover
from .serialize import (
    diameters_to_dict,
    dump_json,
    load_json,
    measurement_from_dict,
    measurement_to_dict,
    pair_to_dict,
    recovery_to_dict,
    signal_from_dict,
    signal_to_dict,
    spec_from_dict,
    spec_to_dict,
)

_ALL_OPTIONS: set[str] = set()


class _Parser(argparse.ArgumentParser):
    """argparse with a did-you-mean hint for unknown flags (exit code 2)."""

    def error(self, message):
        if "unrecognized arguments:" in message:
            bad = [t for t in message.split(":", 1)[1].split() if t.startswith("-")]
            hints = []
            for token in bad:
                close = difflib.get_close_matches(token, sorted(_ALL_OPTIONS), n=1)
                if close:
                    hints.append(f"did you mean {close[0]}?")
            if hints:
                message += " (" + " ".join(hints) + ")"
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add(parser, *names, **kwargs):
    _ALL_OPTIONS.update(n for n in names if n.startswith("--"))
    return parser.add_argument(*names, **kwargs)


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _default_seed() -> int:
    env = os.environ.get("SUPERRES_SEED")
    return int(env) if env else 0


def _load_config(path) -> dict:
    data = load_json(path)
    if isinstance(data, dict) and "command" in data and "config" in data:
        return data["config"]  # manifest replay
    return data


def _write_manifest(command: str, config: dict, inputs, outputs, started: float, path):
    dump_json(
        {
            "command": command,
            "config": config,
            "version": __version__,
            "base_seed": config.get("seed", config.get("base_seed")),
            "inputs": [str(p) for p in inputs],
            "outputs": [str(p) for p in outputs],
            "duration_s": time.monotonic() - started,
        },
        path,
    )


def _sibling_manifest(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


# ---------------------------------------------------------------- generate

def _cmd_generate(args) -> int:
    started = time.monotonic()
    file_cfg = _load_config(args.config) if args.config else {}
    cfg = {
        "d": 3, "p": 2, "h": 0.05, "T": 1.0, "tau": 0.5, "eta": 0.2, "kappa": 1,
        "m_lower": 1.0, "M_upper": 2.0, "seed": _default_seed(),
        "centered": False, "amplitudes": None,
    }
    cfg.update(file_cfg)
    for key, val in [
        ("d", args.d), ("p", args.p), ("h", args.h), ("T", args.big_t),
        ("tau", args.tau), ("eta", args.eta), ("kappa", args.kappa),
        ("m_lower", args.m_lower), ("M_upper", args.m_upper), ("seed", args.seed),
    ]:
        if val is not None:
            cfg[key] = val
    if args.centered:
        cfg["centered"] = True
    if args.amplitudes:
        cfg["amplitudes"] = _float_list(args.amplitudes)
    spec = ClusterSpec(
        d=cfg["d"], p=cfg["p"], h=cfg["h"], T=cfg["T"], tau=cfg["tau"],
        eta=cfg["eta"], kappa=cfg["kappa"], m_lower=cfg["m_lower"],
        M_upper=cfg["M_upper"],
    )
    source = "fixed" if cfg["amplitudes"] else "uniform"
    signal = make_cluster_signal(
        spec, source, seed=cfg["seed"], amplitudes=cfg["amplitudes"],
        centered=cfg["centered"],
    )
    outputs = [args.output]
    dump_json(signal_to_dict(signal), args.output)
    if args.spec_output:
        dump_json(spec_to_dict(spec), args.spec_output)
        outputs.append(args.spec_output)
    _write_manifest("generate", cfg, [], outputs, started, _sibling_manifest(args.output))
    return 0


# ------------------------------------------------------------------ sample

def _cmd_sample(args) -> int:
    started = time.monotonic()
    cfg = {
        "omega": 10.0, "n_samples": 33, "epsilon": 0.0,
        "noise": "none", "seed": _default_seed(),
    }
    cfg.update(_load_config(args.config) if args.config else {})
    for key, val in [
        ("omega", args.omega), ("n_samples", args.n_samples),
        ("epsilon", args.epsilon), ("noise", args.noise), ("seed", args.seed),
    ]:
        if val is not None:
            cfg[key] = val
    signal = signal_from_dict(load_json(args.input))
    grid = MeasurementGrid(cfg["omega"], cfg["n_samples"])
    mode = {"none": "none", "disk": "uniform_complex_disk"}[cfg["noise"]]
    meas = sample_measurement(
        signal, grid, epsilon=cfg["epsilon"], noise_mode=mode, seed=cfg["seed"]
    )
    dump_json(measurement_to_dict(meas), args.output)
    _write_manifest("sample", cfg, [args.input], [args.output], started,
                    _sibling_manifest(args.output))
    return 0


# ----------------------------------------------------------------- recover

def _cmd_recover(args) -> int:
    started = time.monotonic()
    meas = measurement_from_dict(load_json(args.input))
    result = recover(meas, args.d)
    payload = recovery_to_dict(result)
    if args.output:
        dump_json(payload, args.output)
        _write_manifest("recover", {"d": args.d}, [args.input], [args.output],
                        started, _sibling_manifest(args.output))
    else:
        import json

        print(json.dumps(payload, indent=2))
    return 0


# ------------------------------------------------------------- adversarial

def _cmd_adversarial(args) -> int:
    started = time.monotonic()
    cfg = {"epsilon": 1e-5, "omega": 10.0, "grid_density": 2048, "max_halvings": 60}
    cfg.update(_load_config(args.config) if args.config else {})
    for key, val in [
        ("epsilon", args.epsilon), ("omega", args.omega),
        ("grid_density", args.grid_density),
    ]:
        if val is not None:
            cfg[key] = val
    signal = signal_from_dict(load_json(args.signal))
    spec = spec_from_dict(load_json(args.spec))
    pair = build_adversarial_pair(
        signal, spec, epsilon=cfg["epsilon"], omega=cfg["omega"],
        grid_density=cfg["grid_density"], max_halvings=cfg["max_halvings"],
    )
    dump_json(pair_to_dict(pair), args.output)
    _write_manifest("adversarial", cfg, [args.signal, args.spec], [args.output],
                    started, _sibling_manifest(args.output))
    return 0


# ------------------------------------------------------------------ oracle

def _cmd_oracle(args) -> int:
    started = time.monotonic()
    cfg = {
        "omega": 1.0, "box_halfwidths": [0.5, 0.1], "resolution": 40,
        "s_samples": 64, "workers": os.cpu_count() or 1,
        "epsilon": None, "eps_list": None,
    }
    cfg.update(_load_config(args.config) if args.config else {})
    if args.workers is not None:
        cfg["workers"] = args.workers
    if args.omega is not None:
        cfg["omega"] = args.omega
    if args.box_halfwidths is not None:
        cfg["box_halfwidths"] = _float_list(args.box_halfwidths)
    if args.resolution is not None:
        cfg["resolution"] = args.resolution
    if args.s_samples is not None:
        cfg["s_samples"] = args.s_samples
    if args.epsilon is not None:
        cfg["epsilon"] = args.epsilon
    if args.eps_list is not None:
        cfg["eps_list"] = _float_list(args.eps_list)
    if cfg["epsilon"] is None and not cfg["eps_list"]:
        raise SuperresError("oracle needs --epsilon or --eps-list")
    signal = signal_from_dict(load_json(args.signal))
    eps_values = cfg["eps_list"] if cfg["eps_list"] else [cfg["epsilon"]]
    estimates = [
        error_set_diameters(
            signal, eps, cfg["omega"], cfg["box_halfwidths"],
            grid_resolution=cfg["resolution"], s_samples=cfg["s_samples"],
            workers=cfg["workers"],
        )
        for eps in eps_values
    ]
    outputs = []
    if args.output:
        payload = (
            diameters_to_dict(estimates[0])
            if len(estimates) == 1
            else {"sweep": [diameters_to_dict(e) for e in estimates]}
        )
        dump_json(payload, args.output)
        outputs.append(args.output)
    if args.csv:
        import csv as _csv

        d = signal.d
        with open(args.csv, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(
                ["epsilon"]
                + [f"node_diam_{j + 1}" for j in range(d)]
                + [f"amp_diam_{j + 1}" for j in range(d)]
            )
            for eps, est in zip(eps_values, estimates):
                writer.writerow(
                    [repr(float(eps))]
                    + [repr(float(v)) for v in est.per_node_diam]
                    + [repr(float(v)) for v in est.per_amp_diam]
                )
        outputs.append(args.csv)
    if not outputs:
        raise SuperresError("oracle needs --output and/or --csv")
    _write_manifest("oracle", cfg, [args.signal], outputs, started,
                    _sibling_manifest(outputs[0]))
    return 0


# -------------------------------------------------------------- experiment

def _experiment_config(cfg: dict) -> ExperimentConfig:
    return ExperimentConfig(
        spec=spec_from_dict(cfg["spec"]),
        omega=float(cfg["omega"]),
        n_samples=int(cfg["n_samples"]),
        epsilon_rule=cfg.get("epsilon_rule", "rate_bound"),
        epsilon=float(cfg.get("epsilon", 1e-6)),
        rate_coeff=float(cfg.get("rate_coeff", 0.1)),
        rate_floor_div=float(cfg.get("rate_floor_div", 100.0)),
        n_trials=int(cfg["n_trials"]),
        srf_sweep=tuple(cfg.get("srf_sweep", ())),
        base_seed=int(cfg.get("base_seed", 0)),
        shift_halfwidth=float(cfg.get("shift_halfwidth", 0.0)),
    )


def _srf_tag(srf: float) -> str:
    return f"{srf:g}"


def _cmd_experiment(args) -> int:
    started = time.monotonic()
    cfg = _load_config(args.config) if args.config else {}
    cfg.setdefault("quantile", 0.5)
    if args.omega is not None:
        cfg["omega"] = args.omega
    if args.n_samples is not None:
        cfg["n_samples"] = args.n_samples
    if args.trials is not None:
        cfg["n_trials"] = args.trials
    if args.srf_list is not None:
        cfg["srf_sweep"] = _float_list(args.srf_list)
    if args.seed is not None:
        cfg["base_seed"] = args.seed
    elif "base_seed" not in cfg:
        cfg["base_seed"] = _default_seed()
    if args.epsilon is not None:
        cfg["epsilon"] = args.epsilon
        cfg.setdefault("epsilon_rule", "fixed")
    if args.quantile is not None:
        cfg["quantile"] = args.quantile
    missing = [k for k in ("spec", "omega", "n_samples", "n_trials", "srf_sweep") if k not in cfg]
    if missing:
        raise SuperresError(f"experiment config missing keys: {', '.join(missing)}")
    config = _experiment_config(cfg)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = run_sweep(config, workers=workers)
    outputs = []
    for srf in sorted(datasets):
        path = out_dir / f"trials_srf{_srf_tag(srf)}.csv"
        trials_to_csv(datasets[srf], path)
        outputs.append(path)
    summary = summarize_amplification(datasets, quantile=cfg["quantile"])
    summary_to_csv(summary, out_dir / "summary.csv")
    plot_amplification(summary, "x", out_dir / "amplification_kx.svg")
    plot_amplification(summary, "a", out_dir / "amplification_ka.svg")
    outputs += [out_dir / "summary.csv", out_dir / "amplification_kx.svg",
                out_dir / "amplification_ka.svg"]
    _write_manifest("experiment", cfg, [args.config] if args.config else [],
                    outputs, started, out_dir / "manifest.json")
    return 0


# ------------------------------------------------------------------ report

def _cmd_report(args) -> int:
    started = time.monotonic()
    in_dir = Path(args.in_dir)
    trial_csvs = sorted(in_dir.glob("trials_srf*.csv"))
    if not trial_csvs:
        raise SuperresError(f"no trials_srf*.csv files under {in_dir}")
    quantile = args.quantile if args.quantile is not None else 0.5
    summary = summarize_trial_csvs(trial_csvs, quantile=quantile)
    out_dir = Path(args.out_dir) if args.out_dir else in_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_to_csv(summary, out_dir / "summary.csv")
    plot_amplification(summary, "x", out_dir / "amplification_kx.svg")
    plot_amplification(summary, "a", out_dir / "amplification_ka.svg")
    _write_manifest(
        "report", {"quantile": quantile, "in_dir": str(in_dir)},
        [str(p) for p in trial_csvs],
        [out_dir / "summary.csv", out_dir / "amplification_kx.svg",
         out_dir / "amplification_ka.svg"],
        started, out_dir / "report.manifest.json",
    )
    return 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superres", description=__doc__)
    _add(parser, "--version", action="version", version=f"superres {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[], help="generate a clustered positive signal")
    _add(p, "--config", help="JSON config (or manifest) with flag overrides")
    _add(p, "--d", type=int)
    _add(p, "--p", type=int)
    _add(p, "--h", type=float)
    _add(p, "--big-t", dest="big_t", type=float, help="global extent T")
    _add(p, "--tau", type=float)
    _add(p, "--eta", type=float)
    _add(p, "--kappa", type=int)
    _add(p, "--m-lower", dest="m_lower", type=float)
    _add(p, "--m-upper", dest="m_upper", type=float)
    _add(p, "--seed", type=int)
    _add(p, "--centered", action="store_true")
    _add(p, "--amplitudes", help="comma-separated fixed amplitudes")
    _add(p, "--output", required=True)
    _add(p, "--spec-output", dest="spec_output")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sample", help="sample noisy Fourier measurements of a signal")
    _add(p, "--config")
    _add(p, "--input", required=True, help="signal JSON")
    _add(p, "--omega", type=float)
    _add(p, "--n-samples", dest="n_samples", type=int)
    _add(p, "--epsilon", type=float)
    _add(p, "--noise", choices=["none", "disk"])
    _add(p, "--seed", type=int)
    _add(p, "--output", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("recover", help="Matrix Pencil recovery from a measurement JSON")
    _add(p, "--input", required=True, help="measurement JSON")
    _add(p, "--d", type=int, required=True, help="source count")
    _add(p, "--output")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("adversarial", help="construct a worst-case moment-matched pair")
    _add(p, "--config")
    _add(p, "--signal", required=True, help="signal JSON")
    _add(p, "--spec", required=True, help="cluster spec JSON")
    _add(p, "--epsilon", type=float)
    _add(p, "--omega", type=float)
    _add(p, "--grid-density", dest="grid_density", type=int)
    _add(p, "--output", required=True)
    p.set_defaults(func=_cmd_adversarial)

    p = sub.add_parser("oracle", help="brute-force error-set diameters")
    _add(p, "--config")
    _add(p, "--signal", required=True)
    _add(p, "--epsilon", type=float)
    _add(p, "--eps-list", dest="eps_list", help="comma-separated epsilon sweep")
    _add(p, "--omega", type=float)
    _add(p, "--box-halfwidths", dest="box_halfwidths",
         help="comma-separated halfwidths (1, 2 or 2d values)")
    _add(p, "--resolution", type=int)
    _add(p, "--s-samples", dest="s_samples", type=int)
    _add(p, "--workers", type=int)
    _add(p, "--output", help="DiameterEstimate JSON")
    _add(p, "--csv", help="epsilon sweep CSV")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("experiment", help="seeded trial batches over an SRF sweep")
    _add(p, "--config", help="experiment config JSON (or manifest)")
    _add(p, "--omega", type=float)
    _add(p, "--n-samples", dest="n_samples", type=int)
    _add(p, "--trials", type=int)
    _add(p, "--srf-list", dest="srf_list", help="comma-separated SRF sweep")
    _add(p, "--epsilon", type=float, help="fixed per-trial noise level")
    _add(p, "--seed", type=int)
    _add(p, "--quantile", type=float)
    _add(p, "--workers", type=int)
    _add(p, "--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="rebuild summary CSV and SVG plots from trial CSVs")
    _add(p, "--in-dir", dest="in_dir", required=True)
    _add(p, "--out-dir", dest="out_dir")
    _add(p, "--quantile", type=float)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except SuperresError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
