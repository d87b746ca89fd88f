"""
Graph generators for experiments and tests.

This module builds the benchmark graphs used to exercise the clustering
pipeline: line graphs with one weak edge, rings, planted-partition (block
model) graphs, random connected graphs and the bundled karate-club graph.
It also parses the one-line generator specs accepted by the command line.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .exceptions import DisconnectedGraphError, GeneratorSpecError, ValidationError
from .graph import Graph, Partition, build_graph

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
KARATE_FILE = DATA_DIR / "karate.tsv"

# Two-block analog of a 1000-node, ~99k-edge community benchmark.
BENCHMARK_PLANTED = {"n1": 680, "n2": 320, "p_in": 0.34, "p_out": 0.0149}

# Members siding with the instructor after the karate-club split (0-based ids).
KARATE_INSTRUCTOR_FACTION = frozenset(
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 16, 17, 19, 21]
)


def line_graph(n: int, weak_pos: Optional[int] = None, weak_weight: float = 0.1) -> Graph:
    """
    Path graph 0-1-...-(n-1) with unit weights except one weak edge.

    Args:
        n: Node count (>= 2)
        weak_pos: Index of the weak edge (edge e joins nodes e and e+1);
            defaults to the middle edge
        weak_weight: Weight of the weak edge

    Returns:
        Graph
    """
    if n < 2:
        raise ValidationError(f"line graph needs n >= 2, got {n}")
    if weak_pos is None:
        weak_pos = n // 2 - 1
    if not 0 <= weak_pos < n - 1:
        raise ValidationError(f"weak_pos must lie in [0, {n - 1}), got {weak_pos}")
    if weak_weight <= 0:
        raise ValidationError(f"weak_weight must be positive, got {weak_weight}")

    edges = [(i, i + 1, weak_weight if i == weak_pos else 1.0) for i in range(n - 1)]
    return build_graph(edges, n=n)


def ring_graph(n: int) -> Graph:
    """Cycle C_n with unit weights (n >= 3)."""
    if n < 3:
        raise ValidationError(f"ring graph needs n >= 3, got {n}")
    return build_graph([(i, (i + 1) % n, 1.0) for i in range(n)], n=n)


def expected_edge_count(
    block_sizes: Sequence[int], p_in: float, p_out: float
) -> float:
    """Expected number of edges of a block model with uniform in/out probabilities."""
    sizes = np.asarray(block_sizes, dtype=float)
    total = sizes.sum()
    intra = float(np.sum(sizes * (sizes - 1) / 2))
    inter = float((total ** 2 - np.sum(sizes ** 2)) / 2)
    return p_in * intra + p_out * inter


def _block_probabilities(
    n_blocks: int, p_in: float, p_out: float, probs: Optional[np.ndarray]
) -> np.ndarray:
    if probs is None:
        if not 0 <= p_out < p_in <= 1:
            raise ValidationError(
                f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
            )
        mat = np.full((n_blocks, n_blocks), p_out, dtype=float)
        np.fill_diagonal(mat, p_in)
        return mat

    mat = np.asarray(probs, dtype=float)
    if mat.shape != (n_blocks, n_blocks):
        raise ValidationError(
            f"probability matrix shape {mat.shape} does not match {n_blocks} blocks"
        )
    if not np.allclose(mat, mat.T) or mat.min() < 0 or mat.max() > 1:
        raise ValidationError("block probabilities must be symmetric and within [0, 1]")
    return mat


def stochastic_block_graph(
    block_sizes: Sequence[int],
    p_in: float = 0.0,
    p_out: float = 0.0,
    seed: int = 0,
    probs: Optional[np.ndarray] = None,
    max_retries: int = 20,
) -> Graph:
    """
    Sample a connected unit-weight stochastic block model graph.

    Each node pair is joined independently with the probability of its
    block pair. Disconnected draws are discarded and resampled from the
    same generator stream, so the result is a function of the seed.

    Args:
        block_sizes: Node count per block; block b holds a contiguous id range
        p_in: Edge probability inside a block
        p_out: Edge probability across blocks
        seed: RNG seed
        probs: Optional full block-pair probability matrix overriding p_in/p_out
        max_retries: Draws attempted before giving up

    Returns:
        Graph

    Raises:
        DisconnectedGraphError: If no connected draw was found
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or min(sizes) < 1:
        raise ValidationError(f"block sizes must be positive, got {sizes}")
    mat = _block_probabilities(len(sizes), p_in, p_out, probs)

    if len(sizes) > 1 and np.all(mat[~np.eye(len(sizes), dtype=bool)] == 0):
        raise DisconnectedGraphError(
            "zero cross-block probability always yields separate components"
        )

    n = sum(sizes)
    membership = np.repeat(np.arange(len(sizes)), sizes)
    rows, cols = np.triu_indices(n, k=1)
    pair_probs = mat[membership[rows], membership[cols]]
    rng = np.random.default_rng(seed)

    for attempt in range(1, max_retries + 1):
        keep = rng.random(pair_probs.size) < pair_probs
        r, c = rows[keep], cols[keep]
        data = np.ones(2 * r.size)
        adjacency = sp.csr_matrix(
            (data, (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n)
        )
        g = Graph(adjacency)
        if np.all(g.degrees > 0) and g.is_connected():
            logger.info(
                f"Block model {sizes} (seed={seed}): {g.n_edges} edges, "
                f"attempt {attempt}"
            )
            return g
        logger.debug(f"Block model draw {attempt} disconnected, resampling")

    raise DisconnectedGraphError(
        f"no connected block-model draw in {max_retries} attempts "
        f"(sizes={sizes}, seed={seed})"
    )


def planted_partition(
    n1: int, n2: int, p_in: float, p_out: float, seed: int = 0
) -> Graph:
    """Two-block planted partition: nodes 0..n1-1 and n1..n1+n2-1."""
    return stochastic_block_graph([n1, n2], p_in=p_in, p_out=p_out, seed=seed)


def planted_blocks(block_sizes: Sequence[int]) -> Partition:
    """Ground-truth partition of a block-model graph."""
    return Partition.from_labels(np.repeat(np.arange(len(block_sizes)), block_sizes))


def random_connected_graph(
    n: int, p: float = 0.2, seed: int = 0, weighted: bool = True
) -> Graph:
    """
    Random connected graph: a random spanning tree plus independent extra edges.

    Args:
        n: Node count (>= 2)
        p: Probability of each extra non-tree edge
        seed: RNG seed
        weighted: Draw weights uniformly from [0.5, 2.0] instead of unit weights
    """
    if n < 2:
        raise ValidationError(f"random graph needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    pairs = set()
    for pos in range(1, n):
        parent = order[rng.integers(0, pos)]
        a, b = sorted((int(order[pos]), int(parent)))
        pairs.add((a, b))

    rows, cols = np.triu_indices(n, k=1)
    extra = rng.random(rows.size) < p
    pairs.update(zip(rows[extra].tolist(), cols[extra].tolist()))

    edges = sorted(pairs)
    weights = rng.uniform(0.5, 2.0, len(edges)) if weighted else np.ones(len(edges))
    return build_graph([(a, b, w) for (a, b), w in zip(edges, weights)], n=n)


def karate_club() -> Graph:
    """The 34-member, 78-tie karate-club friendship graph (unit weights)."""
    from .edge_list import load_edge_list

    return load_edge_list(KARATE_FILE)


GeneratorFn = Callable[..., Graph]

# name -> (factory, argument parsers, defaults, takes seed)
GENERATORS: Dict[str, Tuple[GeneratorFn, List[Callable], List, bool]] = {
    "line": (line_graph, [int, int, float], [200, None, 0.1], False),
    "ring": (ring_graph, [int], [64], False),
    "planted": (
        planted_partition,
        [int, int, float, float],
        [
            BENCHMARK_PLANTED["n1"],
            BENCHMARK_PLANTED["n2"],
            BENCHMARK_PLANTED["p_in"],
            BENCHMARK_PLANTED["p_out"],
        ],
        True,
    ),
    "random": (random_connected_graph, [int, float], [32, 0.2], True),
    "karate": (karate_club, [], [], False),
}

GENERATOR_HELP = """Generator specs (name:arg:arg...):
  line:N[:POS[:W]]            path of N nodes, edge POS (joining POS, POS+1) weighs W
  ring:N                      cycle of N unit edges
  planted[:N1:N2:PIN:POUT]    two-block planted partition (default 680:320:0.34:0.0149)
  random:N[:P]                random connected weighted graph
  karate                      bundled karate-club graph"""


def from_spec(spec: str, seed: int = 0) -> Graph:
    """
    Build a graph from a generator spec such as ``line:200:99:0.1``.

    Missing trailing arguments take their defaults; seeded generators use
    ``seed``.

    Raises:
        GeneratorSpecError: Unknown name or unparsable argument
    """
    name, *raw_args = spec.strip().split(":")
    if name not in GENERATORS:
        raise GeneratorSpecError(
            f"unknown generator {name!r}; choose from {sorted(GENERATORS)}"
        )
    factory, parsers, defaults, seeded = GENERATORS[name]
    if len(raw_args) > len(parsers):
        raise GeneratorSpecError(
            f"{name} takes at most {len(parsers)} argument(s), got {len(raw_args)}"
        )
    args = list(defaults)
    for idx, (parse, raw) in enumerate(zip(parsers, raw_args)):
        try:
            args[idx] = parse(raw)
        except ValueError as e:
            raise GeneratorSpecError(f"bad argument {raw!r} in {spec!r}") from e

    kwargs = {"seed": seed} if seeded else {}
    g = factory(*args, **kwargs)
    logger.info(f"Generated {g!r} from {spec!r}")
    return g
