"""Tests for partition comparison."""

import pytest

from wave_cluster.comparison import (
    compare_partitions,
    confusion_matrix,
    disagreeing_nodes,
    seed_agreement,
)
from wave_cluster.exceptions import SizeMismatchError
from wave_cluster.graph import Partition


def test_identical_up_to_relabel():
    """Test that swapped labels still match exactly."""
    a = Partition((0, 0, 1, 1, 2))
    b = Partition.from_labels([2, 2, 0, 0, 1])

    result = compare_partitions(a, b)

    assert result["exact_up_to_permutation"]
    assert result["agreement"] == 1.0
    assert result["matched"] == 5


def test_one_node_differs():
    """Test agreement and the disagreeing node when one node moves."""
    a = Partition((0, 0, 0, 1, 1, 1))
    b = Partition((1, 1, 0, 0, 0, 0))

    result = compare_partitions(a, b)

    assert not result["exact_up_to_permutation"]
    assert result["agreement"] == pytest.approx(5 / 6)
    assert disagreeing_nodes(a, b) == [2]


def test_different_cluster_counts():
    """Test matching when the partitions have different k."""
    a = Partition((0, 0, 1, 1))
    b = Partition((0, 1, 2, 2))

    result = compare_partitions(a, b)

    assert result["agreement"] == pytest.approx(0.75)
    assert confusion_matrix(a, b).tolist() == [[1, 1, 0], [0, 0, 2]]


def test_size_mismatch():
    """Test that partitions of different node sets are rejected."""
    with pytest.raises(SizeMismatchError):
        compare_partitions(Partition((0, 1)), Partition((0, 1, 1)))


def test_seed_agreement():
    """Test pairwise agreement over several runs."""
    runs = [Partition((0, 0, 1, 1)), Partition((1, 1, 0, 0)), Partition((0, 1, 1, 1))]

    result = seed_agreement(runs)

    assert result["pairs"] == 3
    assert result["min_agreement"] == pytest.approx(0.75)
    assert not result["all_exact"]
    assert seed_agreement(runs[:2])["all_exact"]
    assert seed_agreement(runs[:1])["pairs"] == 0
