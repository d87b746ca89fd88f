"""Tests for edge-list file ingestion."""

import pytest

from wave_cluster.edge_list import load_edge_list, read_edge_list, write_edge_list
from wave_cluster.exceptions import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    EdgeListFormatError,
    SelfLoopError,
)
from wave_cluster.generators import KARATE_FILE, line_graph


def _write(tmp_path, text, name="edges.tsv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_identity_ids(tmp_path):
    """Test that dense 0-based integer ids keep their numbering."""
    path = _write(tmp_path, "# comment\n0\t1\t2.5\n1\t2\n")

    g = load_edge_list(path)

    assert g.n == 3
    assert g.node_names is None
    assert g.edges() == [(0, 1, 2.5), (1, 2, 1.0)]


def test_load_integer_ids_sorted_numerically(tmp_path):
    """Test that sparse integer ids are renumbered in ascending numeric order."""
    path = _write(tmp_path, "10\t2\n2\t3\t0.5\n")

    g = load_edge_list(path)

    assert g.node_names == ("2", "3", "10")
    assert g.edges() == [(0, 1, 0.5), (0, 2, 1.0)]


def test_load_string_ids_first_appearance(tmp_path):
    """Test that non-integer ids are renumbered by first appearance."""
    path = _write(tmp_path, "alice\tbob\nbob\tcarol\t3\n")

    g = load_edge_list(path)

    assert g.node_names == ("alice", "bob", "carol")
    assert g.name_of(2) == "carol"
    assert g.neighbors(1) == [(0, 1.0), (2, 3.0)]


def test_read_edge_list_frame(tmp_path):
    """Test the raw frame keeps ids as strings and blanks missing weights."""
    path = _write(tmp_path, "a\tb\n\nb\tc\t2\n")

    frame = read_edge_list(path)

    assert frame["i"].tolist() == ["a", "b"]
    assert frame["w"].tolist() == ["", "2"]


def test_missing_second_id(tmp_path):
    """Test that a line with one id is a format error."""
    path = _write(tmp_path, "0\t1\n5\n")

    with pytest.raises(EdgeListFormatError, match="two node ids"):
        load_edge_list(path)


def test_non_numeric_weight(tmp_path):
    """Test that a non-numeric weight is a format error."""
    path = _write(tmp_path, "0\t1\theavy\n")

    with pytest.raises(EdgeListFormatError, match="non-numeric weight"):
        load_edge_list(path)


def test_empty_file(tmp_path):
    """Test that a file with only comments has no edges."""
    path = _write(tmp_path, "# nothing here\n")

    with pytest.raises(EdgeListFormatError, match="no edges"):
        load_edge_list(path)


def test_missing_file(tmp_path):
    """Test that a missing file is reported as a format error."""
    with pytest.raises(EdgeListFormatError, match="cannot read"):
        load_edge_list(tmp_path / "absent.tsv")


def test_graph_errors_propagate(tmp_path):
    """Test that graph validation runs on loaded files."""
    with pytest.raises(SelfLoopError):
        load_edge_list(_write(tmp_path, "0\t0\n", "loop.tsv"))
    with pytest.raises(DuplicateEdgeError):
        load_edge_list(_write(tmp_path, "0\t1\n0\t1\n", "dup.tsv"))


def test_reversed_duplicate_edge(tmp_path):
    """Test that an edge listed in both directions is a duplicate."""
    path = _write(tmp_path, "0\t1\t1.0\n1\t2\n1\t0\t1.0\n")

    with pytest.raises(DuplicateEdgeError, match="listed more than once"):
        load_edge_list(path)


def test_extra_fields_rejected(tmp_path):
    """Test that lines with a fourth field are a format error."""
    path = _write(tmp_path, "0\t1\t1.0\tx\n1\t2\t1.0\tx\n")

    with pytest.raises(EdgeListFormatError, match="more than three fields"):
        read_edge_list(path)
    with pytest.raises(EdgeListFormatError):
        load_edge_list(path)


def test_disconnected_file(tmp_path):
    """Test that disconnected graphs are rejected unless allowed."""
    path = _write(tmp_path, "0\t1\n2\t3\n")

    with pytest.raises(DisconnectedGraphError, match="2 components"):
        load_edge_list(path)
    assert load_edge_list(path, require_connected=False).n == 4


def test_write_then_load(tmp_path):
    """Test that a written graph loads back with the same edges."""
    g = line_graph(6, weak_pos=2, weak_weight=0.1)

    path = write_edge_list(g, tmp_path / "line.tsv")

    assert load_edge_list(path).edges() == g.edges()


def test_bundled_karate_file():
    """Test that the bundled karate file parses."""
    g = load_edge_list(KARATE_FILE)

    assert (g.n, g.n_edges) == (34, 78)
