"""Tests for manifests and output files."""

import json

import numpy as np
import pandas as pd
import pytest

from wave_cluster.exceptions import ValidationError
from wave_cluster.outputs import (
    RunManifest,
    canonical_json,
    load_manifest,
    read_csv,
    to_jsonable,
    write_csv,
    write_json,
    write_manifest,
)


def make_manifest(**overrides):
    fields = dict(
        command="cluster",
        graph_source="generate:ring:16",
        wave_config={"c2": 1.99, "eta": 7.0},
        k=1,
        outputs={"partition": "partition.json"},
        tool_version="0.1.0",
        seed=0,
        arguments={"k": 1},
    )
    fields.update(overrides)
    return RunManifest(**fields)


def test_to_jsonable_numpy():
    """Test conversion of numpy and complex values."""
    data = {"a": np.arange(3), "b": np.float64(0.5), "c": (1, 2), "d": complex(1, -2)}

    assert to_jsonable(data) == {"a": [0, 1, 2], "b": 0.5, "c": [1, 2], "d": [1.0, -2.0]}


def test_canonical_json_is_key_order_independent():
    """Test that canonical JSON sorts keys."""
    assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1})
    assert canonical_json({"a": 1}).endswith("\n")


def test_manifest_hash_is_stable():
    """Test that equal manifests hash equally and differ on any field."""
    assert make_manifest().sha256 == make_manifest().sha256
    assert make_manifest().sha256 != make_manifest(seed=1).sha256
    assert len(make_manifest().sha256) == 64


def test_manifest_round_trip(tmp_path):
    """Test writing and loading a manifest from its directory."""
    manifest = make_manifest()
    write_manifest(tmp_path, manifest)

    loaded = load_manifest(tmp_path)

    assert loaded == manifest


def test_manifest_tamper_detected(tmp_path):
    """Test that an edited manifest fails its hash check."""
    path = write_manifest(tmp_path, make_manifest())
    data = json.loads(path.read_text())
    data["seed"] = 7
    path.write_text(json.dumps(data))

    with pytest.raises(ValidationError, match="hash mismatch"):
        load_manifest(path)


def test_manifest_malformed(tmp_path):
    """Test unreadable and incomplete manifests."""
    with pytest.raises(ValidationError):
        load_manifest(tmp_path / "missing.json")
    with pytest.raises(ValidationError, match="malformed"):
        RunManifest.from_dict({"command": "cluster"})


def test_write_json_carries_hash(tmp_path):
    """Test that JSON outputs embed the manifest hash."""
    path = write_json(tmp_path / "out.json", {"clusters": [0, 1]}, "abc")

    assert json.loads(path.read_text()) == {"clusters": [0, 1], "manifest_sha256": "abc"}


def test_write_csv_hash_line(tmp_path):
    """Test the CSV hash comment and that reading skips it."""
    frame = pd.DataFrame({"node": [0, 1], "re": [0.25, -1.5]})

    path = write_csv(tmp_path / "out.csv", frame, "abc")

    assert path.read_text().splitlines()[0] == "# manifest_sha256=abc"
    pd.testing.assert_frame_equal(read_csv(path), frame)
