"""
Graph representation and normalized Laplacian access.

Graphs are undirected, weighted and immutable once built. The weighted
adjacency is held as a symmetric CSR matrix; everything the wave engine
needs (degree sums, neighbor lists, rows of L = I - D^-1 W) is derived
from it.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order

from .exceptions import (
    DuplicateEdgeError,
    IsolatedNodeError,
    NodeIndexError,
    NonPositiveWeightError,
    NonSymmetricError,
    SelfLoopError,
)

logger = logging.getLogger(__name__)

# Weights below this are indistinguishable from an absent edge.
MIN_WEIGHT = 1e-12

Edge = Tuple[int, int, float]


@dataclass(frozen=True)
class LaplacianRow:
    """One row of the normalized Laplacian, diagonal entry first."""

    owner: int
    entries: Tuple[Tuple[int, float], ...]

    def as_dict(self) -> Dict[int, float]:
        """Map node id to Laplacian value."""
        return dict(self.entries)

    @property
    def row_sum(self) -> float:
        return float(sum(v for _, v in self.entries))


@dataclass(frozen=True)
class Partition:
    """Cluster label per node, canonicalized to 0..k-1 by first occurrence."""

    labels: Tuple[int, ...]
    k: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        object.__setattr__(self, "k", len(set(self.labels)))

    @classmethod
    def from_labels(cls, labels: Iterable) -> "Partition":
        """
        Canonicalize arbitrary hashable labels.

        The first node's label becomes 0, the next new label 1, and so on.
        """
        mapping: Dict = {}
        out = []
        for label in labels:
            key = label.item() if isinstance(label, np.generic) else label
            if key not in mapping:
                mapping[key] = len(mapping)
            out.append(mapping[key])
        return cls(tuple(out))

    @property
    def n(self) -> int:
        return len(self.labels)

    def sizes(self) -> List[int]:
        """Cluster sizes indexed by label."""
        return np.bincount(np.asarray(self.labels, dtype=int), minlength=self.k).tolist()

    def members(self, label: int) -> List[int]:
        """Node ids carrying ``label``."""
        return [i for i, x in enumerate(self.labels) if x == label]

    def to_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=int)


class Graph:
    """Undirected weighted graph backed by a symmetric sparse adjacency."""

    def __init__(
        self,
        adjacency: sp.csr_matrix,
        node_names: Optional[Sequence[str]] = None,
    ):
        """
        Wrap a validated adjacency. Use build_graph for untrusted input.

        Args:
            adjacency: Symmetric CSR matrix of positive weights, zero diagonal
            node_names: Optional original identifiers, indexed by node id
        """
        self._w = sp.csr_matrix(adjacency, dtype=float)
        self._w.sort_indices()
        self._degrees = np.asarray(self._w.sum(axis=1)).ravel()
        self._degrees.setflags(write=False)
        self.node_names = tuple(node_names) if node_names is not None else None
        self._laplacian: Optional[sp.csr_matrix] = None

    @property
    def n(self) -> int:
        return self._w.shape[0]

    @property
    def n_edges(self) -> int:
        """Number of undirected edges."""
        return self._w.nnz // 2

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._w

    @property
    def degrees(self) -> np.ndarray:
        """Degree sums d_i = sum_l W_il."""
        return self._degrees

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise NodeIndexError(f"Node id {i} out of range [0, {self.n})")

    def neighbors(self, i: int) -> List[Tuple[int, float]]:
        """(neighbor id, weight) pairs of node i, by ascending id."""
        self._check_node(i)
        start, end = self._w.indptr[i], self._w.indptr[i + 1]
        return [
            (int(j), float(w))
            for j, w in zip(self._w.indices[start:end], self._w.data[start:end])
        ]

    def edges(self) -> List[Edge]:
        """Each undirected edge once, as (i, j, w) with i < j."""
        upper = sp.triu(self._w, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return [
            (int(upper.row[t]), int(upper.col[t]), float(upper.data[t])) for t in order
        ]

    def laplacian_row(self, i: int) -> LaplacianRow:
        """Row i of L = I - D^-1 W: the diagonal 1 followed by -W_ij/d_i."""
        self._check_node(i)
        d = self._degrees[i]
        entries = [(i, 1.0)] + [(j, -w / d) for j, w in self.neighbors(i)]
        return LaplacianRow(owner=i, entries=tuple(entries))

    def laplacian_matrix(self) -> sp.csr_matrix:
        """Sparse normalized Laplacian L = I - D^-1 W."""
        if self._laplacian is None:
            inv_d = sp.diags(1.0 / self._degrees)
            lap = (sp.identity(self.n, format="csr") - inv_d @ self._w).tocsr()
            lap.sort_indices()
            self._laplacian = lap
        return self._laplacian

    def sym_laplacian(self) -> np.ndarray:
        """Dense symmetric form D^-1/2 (D - W) D^-1/2."""
        inv_sqrt = 1.0 / np.sqrt(self._degrees)
        w = self._w.toarray()
        l_sym = np.eye(self.n) - inv_sqrt[:, None] * w * inv_sqrt[None, :]
        return 0.5 * (l_sym + l_sym.T)

    def is_connected(self) -> bool:
        """Breadth-first traversal from node 0 reaches every node."""
        if self.n == 0:
            return False
        order = breadth_first_order(self._w, 0, directed=False, return_predecessors=False)
        return len(order) == self.n

    def components(self) -> List[List[int]]:
        """Connected components, each sorted, ordered by smallest member."""
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            order = breadth_first_order(
                self._w, start, directed=False, return_predecessors=False
            )
            seen[order] = True
            comps.append(sorted(int(x) for x in order))
        return comps

    def subgraph(self, nodes: Sequence[int]) -> "Graph":
        """
        Induced subgraph on ``nodes``; node ids are renumbered in the given order.

        Isolated nodes in the result are kept; callers check connectivity.
        """
        idx = np.asarray(nodes, dtype=int)
        sub = self._w[idx][:, idx]
        names = None
        if self.node_names is not None:
            names = [self.node_names[i] for i in idx]
        return Graph(sub, node_names=names)

    def name_of(self, i: int) -> str:
        """Original identifier of node i (its id when none was recorded)."""
        if self.node_names is None:
            return str(i)
        return self.node_names[i]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.n_edges})"


def build_graph(
    edges: Iterable[Sequence],
    n: Optional[int] = None,
    node_names: Optional[Sequence[str]] = None,
) -> Graph:
    """
    Build a validated graph from (i, j, w) triples.

    An edge may be listed once in either orientation, or in both orientations
    with the same weight. Listing the same orientation twice is a duplicate.

    Args:
        edges: Iterable of (i, j, w) with integer ids
        n: Node count; defaults to the largest id plus one
        node_names: Optional original identifiers

    Returns:
        Graph

    Raises:
        SelfLoopError, NonPositiveWeightError, NodeIndexError,
        DuplicateEdgeError, NonSymmetricError, IsolatedNodeError
    """
    seen: Dict[Tuple[int, int], Tuple[float, set]] = {}
    max_id = -1
    for edge in edges:
        i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
        if i == j:
            raise SelfLoopError(f"Self-loop on node {i}")
        if not np.isfinite(w) or w < MIN_WEIGHT:
            raise NonPositiveWeightError(
                f"Edge ({i}, {j}) has weight {w}; weights must be finite and >= {MIN_WEIGHT}"
            )
        if i < 0 or j < 0:
            raise NodeIndexError(f"Negative node id in edge ({i}, {j})")
        max_id = max(max_id, i, j)

        key = (min(i, j), max(i, j))
        if key not in seen:
            seen[key] = (w, {(i, j)})
            continue
        prev_w, orientations = seen[key]
        if (i, j) in orientations:
            raise DuplicateEdgeError(f"Edge ({i}, {j}) listed more than once")
        if prev_w != w:
            raise NonSymmetricError(
                f"Edge ({key[0]}, {key[1]}) has weight {prev_w} one way and {w} the other"
            )
        orientations.add((i, j))

    if n is None:
        n = max_id + 1
    if n <= 0:
        raise IsolatedNodeError("Graph has no edges")
    if max_id >= n:
        raise NodeIndexError(f"Node id {max_id} out of range [0, {n})")

    rows = np.empty(2 * len(seen), dtype=int)
    cols = np.empty(2 * len(seen), dtype=int)
    data = np.empty(2 * len(seen), dtype=float)
    for t, ((a, b), (w, _)) in enumerate(seen.items()):
        rows[2 * t], cols[2 * t], data[2 * t] = a, b, w
        rows[2 * t + 1], cols[2 * t + 1], data[2 * t + 1] = b, a, w
    adjacency = sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    degrees = np.asarray(adjacency.sum(axis=1)).ravel()
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise IsolatedNodeError(
            f"{isolated.size} isolated node(s), first ids: {isolated[:10].tolist()}"
        )

    g = Graph(adjacency, node_names=node_names)
    logger.debug(f"Built {g!r}")
    return g


def laplacian_row(g: Graph, i: int) -> LaplacianRow:
    """Row i of the normalized Laplacian of g."""
    return g.laplacian_row(i)
