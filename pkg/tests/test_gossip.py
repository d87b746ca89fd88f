"""Tests for the gossip orthogonal-iteration baseline."""

import math

import numpy as np
import pytest

from wave_cluster.convergence import mixing_time
from wave_cluster.exceptions import ValidationError
from wave_cluster.generators import karate_club, line_graph, ring_graph
from wave_cluster.gossip import (
    default_gossip_steps,
    orthogonal_iteration_distributed,
    push_sum,
    push_sum_matrix,
)
from wave_cluster.oracle import dense_spectral


def test_push_sum_matrix_is_stochastic():
    """Test that the transport matrix rows sum to one."""
    p = push_sum_matrix(karate_club())

    assert np.allclose(np.asarray(p.sum(axis=1)).ravel(), 1.0)


def test_push_sum_converges_to_total():
    """Test that every node's estimate approaches the global sum."""
    g = ring_graph(16)
    values = np.arange(16, dtype=float)

    estimate = push_sum(g, values, 600)

    assert np.allclose(estimate, values.sum(), rtol=1e-6)


def test_push_sum_matrix_valued():
    """Test push-sum on per-node matrices."""
    g = karate_club()
    local = np.random.default_rng(0).uniform(size=(g.n, 2, 2))

    estimate = push_sum(g, local, 800)

    assert estimate.shape == (g.n, 2, 2)
    assert np.allclose(estimate, local.sum(axis=0), rtol=1e-6)


def test_default_gossip_steps():
    """Test the tau log^2 N default length."""
    g = ring_graph(16)
    lambda2 = 1 - math.cos(2 * math.pi / 16)

    steps = default_gossip_steps(g, lambda2)

    assert steps == math.ceil(mixing_time(lambda2) * math.log(16) ** 2)


def test_orthogonal_iteration_k1_is_constant():
    """Test that a single vector converges to the constant direction."""
    g = karate_club()

    result = orthogonal_iteration_distributed(g, 1, rounds=400, gossip_steps=0)

    q = result.q[:, 0]
    assert np.allclose(q, q[0], rtol=1e-6)
    assert q[0] > 0


def test_orthogonal_iteration_exact_sums_line_graph():
    """Test the Fiedler direction with exact global sums."""
    g = line_graph(20, weak_pos=9, weak_weight=0.1)
    ds = dense_spectral(g)

    result = orthogonal_iteration_distributed(g, 2, rounds=2000, gossip_steps=0)

    assert ds.projection_cosine(result.q[:, 1], 2) >= 0.999
    assert result.gossip_steps == 0


def test_orthogonal_iteration_karate_gossip():
    """Test the gossip baseline on the karate club against the oracle signs."""
    g = karate_club()
    ds = dense_spectral(g)

    result = orthogonal_iteration_distributed(g, 2, rounds=300, gossip_steps=400, seed=1)

    fiedler = result.q[:, 1]
    agree = np.sign(fiedler) == np.sign(ds.fiedler)
    assert agree.all() or (~agree).all()
    assert ds.projection_cosine(fiedler, 2) >= 0.99


def test_message_accounting():
    """Test that the baseline sends more scalars per round than the wave method."""
    g = karate_club()

    result = orthogonal_iteration_distributed(g, 2, rounds=5, gossip_steps=10)

    directed = 2 * g.n_edges
    assert result.wave_messages_per_round == directed
    assert result.messages == 5 * directed * (2 + 10 * (4 + 1))
    assert result.message_ratio == pytest.approx(2 + 10 * 5)


def test_default_length_uses_oracle_lambda2():
    """Test that omitting gossip_steps picks the tau log^2 N default."""
    g = ring_graph(8)
    lambda2 = dense_spectral(g).lambda2

    result = orthogonal_iteration_distributed(g, 2, rounds=3)

    assert result.gossip_steps == default_gossip_steps(g, lambda2)


def test_argument_validation():
    """Test k and round validation."""
    g = ring_graph(5)

    with pytest.raises(ValidationError):
        orthogonal_iteration_distributed(g, 0, rounds=1)
    with pytest.raises(ValidationError):
        orthogonal_iteration_distributed(g, 2, rounds=0)


def test_orthogonal_iteration_partition():
    """Test the sign partition of the non-constant columns."""
    g = line_graph(20, weak_pos=9, weak_weight=0.1)

    result = orthogonal_iteration_distributed(g, k=2, rounds=2000, gossip_steps=0)

    assert result.partition().labels == (0,) * 10 + (1,) * 10
    assert result.communication_rounds == 2000


def test_orthogonal_iteration_partition_needs_two_columns():
    """Test that a single constant column carries no partition."""
    result = orthogonal_iteration_distributed(ring_graph(8), k=1, rounds=10, gossip_steps=0)

    with pytest.raises(ValidationError):
        result.partition()
