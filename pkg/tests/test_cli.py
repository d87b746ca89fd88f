"""Tests for the wave-cluster command line."""

import json
import os

import pytest

from wave_cluster.cli import build_parser, main
from wave_cluster.outputs import load_manifest, read_csv


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep WAVE_CLUSTER_* settings from the caller's shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("WAVE_CLUSTER_"):
            monkeypatch.delenv(key)


def test_predict_ring(tmp_path, capsys):
    """Test closed-form predictions for a ring."""
    code = main(["predict", "--ring", "--n", "64", "--out-dir", str(tmp_path)])

    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    saved = json.loads((tmp_path / "prediction.json").read_text())
    assert saved["t_wave"] == pytest.approx(printed["t_wave"])
    assert saved["manifest_sha256"] == load_manifest(tmp_path).sha256


def test_predict_needs_lambda2(tmp_path):
    """Test that predict without --lambda2 or --ring is invalid input."""
    assert main(["predict", "--n", "64", "--out-dir", str(tmp_path)]) == 2


def test_cluster_generated_line(tmp_path):
    """Test cluster outputs for a generated line graph."""
    code = main(
        ["cluster", "--generate", "line:20:9:0.1", "--k", "1", "--out-dir", str(tmp_path)]
    )

    assert code == 0
    partition = json.loads((tmp_path / "partition.json").read_text())
    assert partition["clusters"] == [0] * 10 + [1] * 10
    assert partition["oracle"]["agreement"] == 1.0
    manifest = load_manifest(tmp_path)
    assert partition["manifest_sha256"] == manifest.sha256
    assert manifest.graph_source == "generate:line:20:9:0.1"
    assert "out_dir" not in manifest.wave_config

    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0] == f"# manifest_sha256={manifest.sha256}"
    frame = read_csv(tmp_path / "spectrum.csv")
    assert list(frame.columns) == ["node", "bin", "omega", "re", "im"]


def test_cluster_trajectory_and_bisection(tmp_path):
    """Test the optional trajectory and bisection outputs."""
    code = main(
        [
            "cluster",
            "--generate",
            "line:20:9:0.1",
            "--trajectory",
            "--bisect",
            "1",
            "--out-dir",
            str(tmp_path),
        ]
    )

    assert code == 0
    assert (tmp_path / "trajectory.csv").exists()
    partition = json.loads((tmp_path / "partition.json").read_text())
    assert partition["bisection"]["clusters"] == [0] * 10 + [1] * 10


def test_replay_is_byte_identical(tmp_path):
    """Test that replaying a manifest elsewhere reproduces every file."""
    first = tmp_path / "first"
    second = tmp_path / "second"
    assert main(["cluster", "--generate", "karate", "--seed", "3", "--out-dir", str(first)]) == 0

    code = main(["replay", str(first / "manifest.json"), "--out-dir", str(second)])

    assert code == 0
    for name in ("manifest.json", "partition.json", "spectrum.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_cluster_file_with_self_loop(tmp_path):
    """Test that an invalid edge list exits with status 2."""
    path = tmp_path / "bad.tsv"
    path.write_text("0\t0\t1.0\n0\t1\t1.0\n")

    assert main(["cluster", "--file", str(path), "--out-dir", str(tmp_path)]) == 2


def test_cluster_missing_file(tmp_path):
    """Test that an unreadable file exits with status 2."""
    missing = tmp_path / "missing.tsv"

    assert main(["cluster", "--file", str(missing), "--out-dir", str(tmp_path)]) == 2


def test_cluster_unstable_speed(tmp_path):
    """Test that c^2 outside (0, 2) exits with status 2."""
    code = main(
        ["cluster", "--generate", "ring:8", "--c2", "2.5", "--out-dir", str(tmp_path)]
    )

    assert code == 2


def test_cluster_budget_from_environment(tmp_path, monkeypatch):
    """Test that a horizon budget from the environment exits with status 4."""
    monkeypatch.setenv("WAVE_CLUSTER_MIN_T_MAX", "16")
    monkeypatch.setenv("WAVE_CLUSTER_MAX_T_MAX", "64")

    code = main(["cluster", "--generate", "line:200", "--out-dir", str(tmp_path)])

    assert code == 4
    assert not (tmp_path / "manifest.json").exists()


def test_convergence_sweep(tmp_path):
    """Test the convergence command's outputs."""
    code = main(["convergence", "ring", "16,32", "--out-dir", str(tmp_path)])

    assert code == 0
    frame = read_csv(tmp_path / "convergence.csv")
    assert frame["N"].tolist() == [16, 32]
    fit = json.loads((tmp_path / "convergence_fit.json").read_text())
    assert set(fit) >= {"wave_rounds", "heat_rounds", "manifest_sha256"}


def test_compare_generated_line(tmp_path, capsys):
    """Test the comparison report of the wave method and the baselines."""
    code = main(
        [
            "compare",
            "--generate",
            "line:20:9:0.1",
            "--rounds",
            "2000",
            "--gossip-steps",
            "0",
            "--out-dir",
            str(tmp_path),
        ]
    )

    assert code == 0
    saved = json.loads((tmp_path / "comparison.json").read_text())
    assert saved["manifest_sha256"] == load_manifest(tmp_path).sha256
    reports = {r["method"]: r for r in saved["reports"]}
    assert set(reports) == {"wave", "orthogonal_iteration", "heat"}
    assert {r["graph"] for r in saved["reports"]} == {"generate:line:20:9:0.1"}
    assert reports["wave"]["partition_agreement"] == 1.0
    assert reports["orthogonal_iteration"]["partition_agreement"] == 1.0
    assert reports["heat"]["partition_agreement"] is None
    assert "messages_scalar_equiv" in capsys.readouterr().out


def test_compare_negative_gossip_steps(tmp_path):
    """Test that a negative gossip length is invalid input."""
    args = ["compare", "--generate", "karate", "--gossip-steps", "-1"]

    assert main(args + ["--out-dir", str(tmp_path)]) == 2
    assert not (tmp_path / "comparison.json").exists()


def test_convergence_bad_sizes(tmp_path):
    """Test size-list validation."""
    assert main(["convergence", "ring", "16,x", "--out-dir", str(tmp_path)]) == 2


def test_spectrum_fixed_horizon(tmp_path):
    """Test the spectrum dump with a fixed horizon."""
    code = main(
        [
            "spectrum",
            "--generate",
            "ring:16",
            "--node",
            "3",
            "--tmax",
            "256",
            "--out-dir",
            str(tmp_path),
        ]
    )

    assert code == 0
    frame = read_csv(tmp_path / "spectrum.csv")
    assert len(frame) == 129
    assert (frame["node"] == 3).all()
    peaks = json.loads((tmp_path / "spectrum_peaks.json").read_text())
    assert peaks["t_max"] == 256


def test_node_out_of_range(tmp_path):
    """Test --node validation."""
    code = main(
        ["spectrum", "--generate", "ring:8", "--node", "8", "--out-dir", str(tmp_path)]
    )

    assert code == 2


def test_parser_rejects_missing_source():
    """Test that cluster needs --file or --generate."""
    with pytest.raises(SystemExit):
        build_parser().parse_args(["cluster"])
    with pytest.raises(SystemExit):
        main(["convergence", "grid", "16"])
