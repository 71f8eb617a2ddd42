import json

import numpy as np
import pytest

from quadnls.cli import main
from quadnls.ground_state import load_ground_state

FAST = [
    "--set", "grid.num_nodes=512",
    "--set", "grid.r_max=24.0",
    "--set", "solver.tol_pohozaev=0.001",
    "--set", "evolve.grid.num_nodes=1024",
    "--set", "evolve.grid.r_max=12.0",
]


def test_rejects_bad_dimension(tmp_path, capsys):
    code = main(["ground-state", "--set", "grid.n=7", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "grid.n" in err and "n >= 6" in err


def test_rejects_unknown_key(tmp_path, capsys):
    code = main(["verify", "--set", "grid.bogus=1", "--out", str(tmp_path)])
    assert code == 2
    assert "unknown configuration key" in capsys.readouterr().err


def test_rejects_malformed_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    code = main(["verify", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2


def test_ground_state_artifacts(tmp_path):
    code = main(["ground-state", *FAST, "--out", str(tmp_path)])
    assert code == 0
    summary = json.loads((tmp_path / "ground_state.json").read_text())
    assert summary["schema_version"] == 1
    assert summary["converged"] is True
    assert summary["alpha1"] * summary["C_op"] == pytest.approx(1.0, abs=1e-9)
    loaded = load_ground_state(tmp_path / "ground_state.csv")
    assert loaded.values.Q == pytest.approx(summary["values"]["Q"], rel=1e-12)
    assert loaded.values.K == pytest.approx(summary["values"]["K"], rel=1e-12)


def test_evolve_gaussian_artifacts(tmp_path):
    code = main([
        "evolve", *FAST,
        "--set", "evolve.data.family=gaussian",
        "--set", 'evolve.data.parameters={"amplitude": 0.05, "width": 1.0}',
        "--set", "evolve.t_max=0.02",
        "--out", str(tmp_path),
    ])
    assert code == 0
    summary = json.loads((tmp_path / "evolve.json").read_text())
    assert summary["verdict"] == "BOUNDED"
    assert summary["Q_drift"] <= 1e-8
    rows = np.genfromtxt(tmp_path / "trajectory.csv", delimiter=",", names=True)
    assert len(rows["t"]) == summary["samples"]


def test_dichotomy_classification_only(tmp_path):
    code = main([
        "dichotomy", *FAST,
        "--set", "dichotomy.simulate=false",
        "--set", 'dichotomy.parameters={"scale": 1.1}',
        "--out", str(tmp_path),
    ])
    assert code == 0
    doc = json.loads((tmp_path / "dichotomy.json").read_text())
    assert doc["classification"] == "BLOWUP_CANDIDATE"
    assert doc["simulation"] is None
    assert doc["KQ"] / doc["KQ_star"] == pytest.approx(1.1**4, rel=1e-3)


def test_dichotomy_simulated_blowup(tmp_path):
    code = main([
        "dichotomy", *FAST,
        "--set", 'dichotomy.parameters={"scale": 1.1}',
        "--set", "evolve.t_max=10.0",
        "--out", str(tmp_path),
    ])
    assert code == 0
    doc = json.loads((tmp_path / "dichotomy.json").read_text())
    assert doc["classification"] == "BLOWUP_CANDIDATE"
    assert doc["simulation"]["verdict"] == "BLOWUP"
    assert doc["consistency"] == "AGREE"
    assert (tmp_path / "trajectory.csv").exists()


def test_determinism_byte_identical(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    args = ["dichotomy", *FAST, "--set", "dichotomy.simulate=false",
            "--seed", "3"]
    assert main([*args, "--out", str(out1)]) == 0
    assert main([*args, "--out", str(out2)]) == 0
    assert (out1 / "dichotomy.json").read_bytes() == (out2 / "dichotomy.json").read_bytes()


def test_verify_fast_config(tmp_path):
    code = main([
        "verify",
        "--set", "grid.num_nodes=1024",
        "--set", "evolve.grid.num_nodes=2048",
        "--set", "evolve.grid.r_max=12.0",
        "--out", str(tmp_path),
    ])
    assert code == 0
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["passed"] is True
    assert all(c["passed"] for c in doc["checks"])


def test_plot_scripts_emitted(tmp_path):
    code = main([
        "ground-state", *FAST,
        "--set", "output.emit_plot_scripts=true",
        "--out", str(tmp_path),
    ])
    assert code == 0
    assert (tmp_path / "plot_ground_state.py").exists()
