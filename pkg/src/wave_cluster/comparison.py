"""
Partition comparison.

Partitions are equal when they differ only by a relabeling of clusters.
Agreement is the largest fraction of nodes that a one-to-one label matching
can put in corresponding clusters.
"""

import itertools
import logging
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from .exceptions import SizeMismatchError
from .graph import Partition

logger = logging.getLogger(__name__)


def confusion_matrix(a: Partition, b: Partition) -> np.ndarray:
    """Counts of nodes labeled (x in a, y in b)."""
    table = pd.crosstab(
        pd.Series(a.labels, name="a"), pd.Series(b.labels, name="b"), dropna=False
    )
    return table.to_numpy()


def compare_partitions(a: Partition, b: Partition) -> Dict[str, Any]:
    """
    Best-match agreement between two partitions of the same nodes.

    Args:
        a: First partition
        b: Second partition

    Returns:
        Dictionary with exact_up_to_permutation, agreement, matched, n

    Raises:
        SizeMismatchError: Partitions cover different node counts
    """
    if a.n != b.n:
        raise SizeMismatchError(f"partitions cover {a.n} and {b.n} nodes")
    if a.n == 0:
        return {"exact_up_to_permutation": True, "agreement": 1.0, "matched": 0, "n": 0}

    counts = confusion_matrix(a, b)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    matched = int(counts[rows, cols].sum())
    return {
        "exact_up_to_permutation": matched == a.n,
        "agreement": matched / a.n,
        "matched": matched,
        "n": a.n,
    }


def disagreeing_nodes(a: Partition, b: Partition) -> List[int]:
    """Nodes outside the best label matching between a and b."""
    if a.n != b.n:
        raise SizeMismatchError(f"partitions cover {a.n} and {b.n} nodes")
    counts = confusion_matrix(a, b)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    a_ids = sorted(set(a.labels))
    b_ids = sorted(set(b.labels))
    match = {a_ids[r]: b_ids[c] for r, c in zip(rows, cols)}
    return [i for i, (x, y) in enumerate(zip(a.labels, b.labels)) if match.get(x) != y]


def seed_agreement(partitions: Sequence[Partition]) -> Dict[str, Any]:
    """
    Pairwise agreement across partitions from runs with different seeds.

    Returns:
        Dictionary with min_agreement, mean_agreement, pairs and all_exact
    """
    scores = [
        compare_partitions(p, q)["agreement"]
        for p, q in itertools.combinations(partitions, 2)
    ]
    if not scores:
        return {"min_agreement": 1.0, "mean_agreement": 1.0, "pairs": 0, "all_exact": True}
    result = {
        "min_agreement": float(min(scores)),
        "mean_agreement": float(np.mean(scores)),
        "pairs": len(scores),
        "all_exact": all(s == 1.0 for s in scores),
    }
    logger.info(
        f"Seed robustness over {len(partitions)} runs: "
        f"min agreement {result['min_agreement']:.1%}"
    )
    return result
