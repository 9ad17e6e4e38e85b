import json

import numpy as np
import pytest

from superres.cli import main
from superres.serialize import load_json, signal_from_dict


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def cluster_files(tmp_path):
    sig = tmp_path / "sig.json"
    spec = tmp_path / "spec.json"
    code = run_cli(
        "generate", "--d", "2", "--p", "2", "--h", "0.1", "--tau", "1.0",
        "--eta", "0.5", "--big-t", "1.0", "--amplitudes", "1,1", "--centered",
        "--output", str(sig), "--spec-output", str(spec),
    )
    assert code == 0
    return sig, spec


class TestRoundTrip:
    def test_generate_sample_recover(self, tmp_path):
        sig_path = tmp_path / "sig.json"
        meas_path = tmp_path / "meas.json"
        out_path = tmp_path / "result.json"
        assert run_cli(
            "generate", "--d", "3", "--p", "2", "--h", "0.05", "--tau", "0.5",
            "--eta", "0.2", "--big-t", "0.5", "--seed", "5",
            "--output", str(sig_path),
        ) == 0
        assert run_cli(
            "sample", "--input", str(sig_path), "--omega", "10", "--n-samples",
            "33", "--epsilon", "0", "--output", str(meas_path),
        ) == 0
        assert run_cli(
            "recover", "--input", str(meas_path), "--d", "3",
            "--output", str(out_path),
        ) == 0
        sig = signal_from_dict(load_json(sig_path))
        result = load_json(out_path)
        est = signal_from_dict(result["estimate"])
        assert np.max(np.abs(est.nodes - sig.nodes)) * 10 < 1e-6
        assert np.max(np.abs(est.amplitudes.real - sig.amplitudes.real)) < 1e-6
        assert "singular_values_upper" in result

    def test_recover_prints_without_output(self, tmp_path, capsys):
        sig_path = tmp_path / "sig.json"
        meas_path = tmp_path / "meas.json"
        run_cli("generate", "--d", "2", "--p", "2", "--h", "0.1", "--tau", "1",
                "--eta", "0.5", "--big-t", "1", "--output", str(sig_path))
        run_cli("sample", "--input", str(sig_path), "--omega", "5",
                "--n-samples", "17", "--output", str(meas_path))
        assert run_cli("recover", "--input", str(meas_path), "--d", "2") == 0
        payload = json.loads(capsys.readouterr().out)
        assert "estimate" in payload


class TestAdversarialCommand:
    def test_writes_certificate(self, cluster_files, tmp_path):
        sig, spec = cluster_files
        out = tmp_path / "pair.json"
        assert run_cli(
            "adversarial", "--signal", str(sig), "--spec", str(spec),
            "--epsilon", "1e-5", "--omega", "10", "--output", str(out),
        ) == 0
        pair = load_json(out)
        assert pair["sup_norm_achieved"] <= pair["epsilon"]
        assert pair["positive"] is True
        assert pair["interleaving"] is True
        assert len(pair["moment_residuals"]) == 3
        assert (tmp_path / "pair.json.manifest.json").exists()

    def test_out_of_regime_exit_code(self, cluster_files, tmp_path, capsys):
        sig, spec = cluster_files
        out = tmp_path / "pair.json"
        # with the halving budget capped the calibration cannot reach an
        # admissible shift for this epsilon
        cfg = tmp_path / "adv.json"
        cfg.write_text(json.dumps({"max_halvings": 3}))
        code = run_cli(
            "adversarial", "--config", str(cfg), "--signal", str(sig),
            "--spec", str(spec), "--epsilon", "1e-2", "--omega", "10",
            "--output", str(out),
        )
        assert code == 1
        err = capsys.readouterr().err
        assert "RegimeExceededError" in err
        assert "no admissible" in err


class TestOracleCommand:
    def test_json_and_csv(self, tmp_path):
        sig_path = tmp_path / "sig.json"
        with open(sig_path, "w") as fh:
            json.dump({"nodes": [0.0], "amplitudes_re": [1.0],
                       "amplitudes_im": [0.0], "positive": True}, fh)
        out = tmp_path / "est.json"
        csv_path = tmp_path / "sweep.csv"
        assert run_cli(
            "oracle", "--signal", str(sig_path), "--eps-list", "0.05,0.1",
            "--omega", "1.0", "--box-halfwidths", "0.5,0.05",
            "--resolution", "20", "--output", str(out), "--csv", str(csv_path),
        ) == 0
        payload = load_json(out)
        assert len(payload["sweep"]) == 2
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "epsilon,node_diam_1,amp_diam_1"
        assert len(lines) == 3

    def test_requires_epsilon(self, tmp_path, capsys):
        sig_path = tmp_path / "sig.json"
        with open(sig_path, "w") as fh:
            json.dump({"nodes": [0.0], "amplitudes_re": [1.0],
                       "amplitudes_im": [0.0], "positive": True}, fh)
        assert run_cli("oracle", "--signal", str(sig_path),
                       "--output", str(tmp_path / "o.json")) == 1


EXPERIMENT_CONFIG = {
    "spec": {"d": 3, "p": 2, "h": 0.01, "T": 0.3, "tau": 0.4, "eta": 0.15,
             "kappa": 1, "m_lower": 1.0, "M_upper": 2.0},
    "omega": 20.0,
    "n_samples": 33,
    "epsilon_rule": "rate_bound",
    "rate_coeff": 0.1,
    "n_trials": 5,
    "srf_sweep": [2.0, 4.0],
    "base_seed": 42,
    "shift_halfwidth": 0.02,
}


class TestExperimentCommand:
    def test_outputs_and_manifest_replay(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(EXPERIMENT_CONFIG))
        run1 = tmp_path / "run1"
        assert run_cli("experiment", "--config", str(cfg),
                       "--out-dir", str(run1)) == 0
        for name in ("trials_srf2.csv", "trials_srf4.csv", "summary.csv",
                     "amplification_kx.svg", "amplification_ka.svg",
                     "manifest.json"):
            assert (run1 / name).exists(), name
        # replaying the manifest reproduces the CSVs byte for byte
        run2 = tmp_path / "run2"
        assert run_cli("experiment", "--config", str(run1 / "manifest.json"),
                       "--out-dir", str(run2)) == 0
        for name in ("trials_srf2.csv", "trials_srf4.csv", "summary.csv"):
            assert (run1 / name).read_bytes() == (run2 / name).read_bytes(), name

    def test_flag_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(EXPERIMENT_CONFIG))
        run_dir = tmp_path / "run"
        assert run_cli("experiment", "--config", str(cfg), "--trials", "3",
                       "--srf-list", "2.0", "--out-dir", str(run_dir)) == 0
        manifest = load_json(run_dir / "manifest.json")
        assert manifest["config"]["n_trials"] == 3
        assert manifest["config"]["srf_sweep"] == [2.0]
        lines = (run_dir / "trials_srf2.csv").read_text().splitlines()
        assert len(lines) == 1 + 3 * 3  # header + trials * nodes

    def test_report_rebuilds_summary(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(EXPERIMENT_CONFIG))
        run_dir = tmp_path / "run"
        run_cli("experiment", "--config", str(cfg), "--out-dir", str(run_dir))
        original = (run_dir / "summary.csv").read_bytes()
        out_dir = tmp_path / "rebuilt"
        assert run_cli("report", "--in-dir", str(run_dir),
                       "--out-dir", str(out_dir)) == 0
        assert (out_dir / "summary.csv").read_bytes() == original


class TestErrorsAndUsage:
    def test_unknown_flag_exit_2_with_suggestion(self, tmp_path, capsys):
        code = run_cli("recover", "--input", "x.json", "--d", "2", "--outptu", "y")
        assert code == 2
        err = capsys.readouterr().err
        assert "did you mean --output?" in err

    def test_missing_subcommand_exit_2(self):
        assert run_cli() == 2

    def test_domain_error_exit_1(self, tmp_path, capsys):
        # duplicate nodes make the signal degenerate
        sig = tmp_path / "bad.json"
        sig.write_text(json.dumps({"nodes": [0.0, 0.0], "amplitudes_re": [1, 1],
                                   "amplitudes_im": [0, 0], "positive": False}))
        code = run_cli("sample", "--input", str(sig), "--omega", "1",
                       "--n-samples", "5", "--output", str(tmp_path / "m.json"))
        assert code == 1
        assert "DegenerateSignalError" in capsys.readouterr().err

    def test_env_seed_override(self, tmp_path, monkeypatch):
        out_env = tmp_path / "a.json"
        out_flag = tmp_path / "b.json"
        monkeypatch.setenv("SUPERRES_SEED", "777")
        run_cli("generate", "--d", "2", "--p", "2", "--h", "0.1", "--tau", "1",
                "--eta", "0.5", "--big-t", "1", "--output", str(out_env))
        monkeypatch.delenv("SUPERRES_SEED")
        run_cli("generate", "--d", "2", "--p", "2", "--h", "0.1", "--tau", "1",
                "--eta", "0.5", "--big-t", "1", "--seed", "777",
                "--output", str(out_flag))
        assert load_json(out_env)["amplitudes_re"] == load_json(out_flag)["amplitudes_re"]

    def test_generate_manifest_sibling(self, tmp_path):
        out = tmp_path / "sig.json"
        run_cli("generate", "--d", "2", "--p", "2", "--h", "0.1", "--tau", "1",
                "--eta", "0.5", "--big-t", "1", "--output", str(out))
        manifest = load_json(tmp_path / "sig.json.manifest.json")
        assert manifest["command"] == "generate"
        assert "duration_s" in manifest
        assert manifest["config"]["d"] == 2
