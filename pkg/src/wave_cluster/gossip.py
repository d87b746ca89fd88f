"""
Gossip-based orthogonal iteration baseline.

Each round every node forms V_i = sum_j J_ij Q_j from its neighbors' rows,
builds the k x k matrix K_i = d_i V_i^T V_i, and the network estimates
K = sum_i K_i by push-sum gossip. Each node then factors its estimate
K = R^T R and keeps Q_i = V_i R^-1. The iterates converge to the k
smallest-eigenvalue eigenvectors of L, at a per-round cost of k x k
matrices per edge instead of the single scalar the wave method sends.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exceptions import CholeskyError, MixingTimeUndefinedError, ValidationError
from .graph import Graph, Partition
from .spectral import assign_clusters

logger = logging.getLogger(__name__)


@dataclass
class OrthogonalIterationResult:
    """Final per-node rows of Q plus communication accounting."""

    q: np.ndarray
    rounds: int
    gossip_steps: int
    restarts: int
    messages: int
    wave_messages_per_round: int

    @property
    def messages_per_round(self) -> float:
        return self.messages / max(self.rounds, 1)

    @property
    def message_ratio(self) -> float:
        """Scalars sent per round relative to one wave round."""
        return self.messages_per_round / self.wave_messages_per_round

    @property
    def communication_rounds(self) -> int:
        """Neighbor exchanges: one per iteration plus one per gossip step."""
        return self.rounds * (1 + self.gossip_steps)

    def partition(self) -> Partition:
        """Clusters from the signs of columns 2..k, the non-constant directions."""
        if self.q.shape[1] < 2:
            raise ValidationError("a partition needs at least two columns")
        return assign_clusters(np.where(self.q[:, 1:] > 0, 1, -1))


def push_sum_matrix(g: Graph) -> sp.csr_matrix:
    """Lazy transport P = (I + B) / 2 with B_ij = 1/deg(i) over neighbors."""
    counts = np.diff(g.adjacency.indptr).astype(float)
    pattern = g.adjacency.copy()
    pattern.data = np.ones_like(pattern.data)
    b = sp.diags(1.0 / counts) @ pattern
    return (0.5 * (sp.identity(g.n, format="csr") + b)).tocsr()


def push_sum(g: Graph, values: np.ndarray, steps: int) -> np.ndarray:
    """
    Per-node estimates of sum_i values[i] after ``steps`` push-sum rounds.

    Every node starts with weight 1 and scales its ratio by N.
    """
    transport = push_sum_matrix(g).T.tocsr()
    flat = np.asarray(values, dtype=float).reshape(g.n, -1)
    weights = np.ones(g.n)
    for _ in range(steps):
        flat = transport @ flat
        weights = transport @ weights
    estimate = g.n * flat / weights[:, None]
    return estimate.reshape(np.shape(values))


def default_gossip_steps(g: Graph, lambda2: float) -> int:
    """ceil(tau * log^2 N) with tau the mixing time for lambda_2."""
    from .convergence import mixing_time

    try:
        tau = mixing_time(lambda2)
    except MixingTimeUndefinedError:
        tau = 1.0
    return max(1, int(math.ceil(tau * math.log(g.n) ** 2)))


def _orthonormalize_exact(v: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    gram = v.T @ (degrees[:, None] * v)
    try:
        r = scipy.linalg.cholesky(gram, lower=False)
    except np.linalg.LinAlgError as e:
        raise CholeskyError(f"Gram matrix not positive definite: {e}") from e
    return scipy.linalg.solve_triangular(r, v.T, trans="T", lower=False).T


def _orthonormalize_gossip(
    g: Graph, v: np.ndarray, degrees: np.ndarray, steps: int
) -> np.ndarray:
    k = v.shape[1]
    local = degrees[:, None, None] * v[:, :, None] * v[:, None, :]
    estimates = push_sum(g, local, steps)
    estimates = 0.5 * (estimates + np.transpose(estimates, (0, 2, 1)))
    try:
        lower = np.linalg.cholesky(estimates)
    except np.linalg.LinAlgError as e:
        raise CholeskyError(f"a node's Gram estimate is not positive definite: {e}") from e
    return np.linalg.solve(lower, v.reshape(g.n, k, 1))[:, :, 0]


def orthogonal_iteration_distributed(
    g: Graph,
    k: int,
    rounds: int,
    gossip_steps: Optional[int] = None,
    seed: int = 0,
    lambda2: Optional[float] = None,
    max_restarts: int = 3,
) -> OrthogonalIterationResult:
    """
    Distributed orthogonal iteration with gossip-estimated Gram matrices.

    Uses the lazy operator J = I - L/2, which has the eigenvectors of L with
    eigenvalues in [0, 1], so bipartite graphs converge too. Gram matrices
    are degree-weighted, making the columns orthonormal in the inner product
    where the eigenvectors of L are orthogonal.

    Args:
        g: Connected graph
        k: Number of vectors (the first converges to the constant vector)
        rounds: Orthogonal-iteration rounds
        gossip_steps: Push-sum steps per round; None uses ceil(tau log^2 N),
            0 uses exact global sums
        seed: Seed for the random starting block
        lambda2: Second eigenvalue used for the default gossip length
        max_restarts: New random starts tried after a Cholesky failure

    Returns:
        OrthogonalIterationResult

    Raises:
        CholeskyError: Factorization failed after all restarts
    """
    if not 1 <= k <= g.n:
        raise ValidationError(f"k must lie in [1, {g.n}], got {k}")
    if rounds < 1:
        raise ValidationError(f"rounds must be at least 1, got {rounds}")
    if gossip_steps is None:
        if lambda2 is None:
            from .oracle import dense_spectral

            lambda2 = dense_spectral(g).lambda2
        gossip_steps = default_gossip_steps(g, lambda2)

    degrees = np.asarray(g.degrees, dtype=float)
    lap = g.laplacian_matrix()
    rng = np.random.default_rng(seed)
    restarts = 0

    while True:
        q = rng.standard_normal((g.n, k))
        try:
            for _ in range(rounds):
                v = q - 0.5 * (lap @ q)
                if gossip_steps == 0:
                    q = _orthonormalize_exact(v, degrees)
                else:
                    q = _orthonormalize_gossip(g, v, degrees, gossip_steps)
            break
        except CholeskyError as e:
            restarts += 1
            if restarts > max_restarts:
                raise
            logger.warning(f"Cholesky failed ({e}); restart {restarts} with a new block")

    lead = np.argmax(np.abs(q), axis=0)
    q = q * np.where(q[lead, np.arange(k)] < 0, -1.0, 1.0)[None, :]

    directed_edges = 2 * g.n_edges
    if gossip_steps == 0:
        per_round = directed_edges * k + 2 * g.n * k * k
    else:
        per_round = directed_edges * (k + gossip_steps * (k * k + 1))
    result = OrthogonalIterationResult(
        q=q,
        rounds=rounds,
        gossip_steps=gossip_steps,
        restarts=restarts,
        messages=per_round * rounds,
        wave_messages_per_round=directed_edges,
    )
    logger.info(
        f"Orthogonal iteration: {rounds} rounds x {gossip_steps} gossip steps, "
        f"{result.message_ratio:.1f}x the scalars of a wave round"
    )
    return result
