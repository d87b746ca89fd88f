"""
Wave-equation graph clustering.

WaveClusterer runs the whole pipeline on one graph: random initial
condition, synchronous wave rounds until the horizon resolves the lowest
frequencies, per-node spectra, eigenvalue recovery, coefficient signs and
cluster ids. Small graphs are additionally checked against the dense
spectral oracle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .comparison import compare_partitions
from .config import Config
from .exceptions import (
    BudgetExceededError,
    InsufficientPeaksError,
    NoisyFloorError,
    ValidationError,
)
from .graph import Graph, Partition
from .oracle import dense_spectral, eigengap_report, is_degenerate, oracle_partition
from .spectral import (
    EigenEstimate,
    EigenPeak,
    align_phase,
    assign_clusters,
    coefficients_at,
    estimate_eigenpairs,
    frequency_to_eigenvalue,
    phase_reference,
    refine_frequency,
)
from .wave import WaveConfig, WaveRun, init_run, next_power_of_two, run_to, suggest_rounds

logger = logging.getLogger(__name__)

# Nodes whose coefficient is below this fraction of the peak's largest sit
# near a nodal line; their sign may keep changing with the horizon.
NODAL_FRACTION = 0.01


@dataclass
class HorizonCheck:
    """Agreement of the estimate from the first half of a horizon with the full one."""

    horizon: int
    eigenvalue_drift: float
    eigenvalue_tolerance: float
    sign_flips: int
    needed: int

    @property
    def settled(self) -> bool:
        return (
            self.eigenvalue_drift <= self.eigenvalue_tolerance
            and self.sign_flips == 0
            and self.horizon >= self.needed
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "eigenvalue_drift": self.eigenvalue_drift,
            "eigenvalue_tolerance": self.eigenvalue_tolerance,
            "sign_flips": self.sign_flips,
            "needed": self.needed,
            "settled": self.settled,
        }


def sign_flips(peak: EigenPeak, half_coefficients: np.ndarray) -> int:
    """
    Nodes whose sign differs between a half-horizon fit and the full peak.

    Counted up to a global sign flip, over nodes at least NODAL_FRACTION of
    the largest coefficient and not flagged as zero components.
    """
    full = peak.coefficients
    half = align_phase(half_coefficients, phase_reference(half_coefficients))
    resolved = np.abs(full) >= NODAL_FRACTION * float(np.max(np.abs(full)))
    resolved[list(peak.zero_nodes)] = False
    differ = int(np.sum((full[resolved] > 0) != (half[resolved] > 0)))
    return min(differ, int(resolved.sum()) - differ)


@dataclass
class ClusterResult:
    """Outcome of one wave clustering run."""

    partition: Partition
    estimate: EigenEstimate
    t_max: int
    run: WaveRun = field(repr=False)
    horizons: List[int] = field(default_factory=list)
    repaired: Dict[int, List[int]] = field(default_factory=dict)
    oracle: Optional[Dict[str, Any]] = None
    checks: List[HorizonCheck] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.estimate.k

    @property
    def messages(self) -> int:
        """Scalars exchanged: one per directed edge per round plus the O(N) gather."""
        graph = self.run.graph
        return 2 * graph.n_edges * self.t_max + graph.n

    def flags(self) -> Dict[str, Any]:
        return {
            "frequency_inconsistent": self.estimate.frequency_inconsistent,
            "zero_components": self.estimate.zero_nodes(),
            "repaired_nodes": sorted({i for nodes in self.repaired.values() for i in nodes}),
            "degenerate_eigengap": bool(self.oracle and self.oracle["degenerate_eigengap"]),
            "horizons": list(self.horizons),
            "horizon_checks": [check.to_dict() for check in self.checks],
        }

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready result: configuration, cluster ids, peaks, flags and oracle check."""
        graph = self.run.graph
        cfg = self.run.config
        result = {
            "config": {"c2": cfg.c2, "eta": cfg.eta, "seed": cfg.seed, "t_max": self.t_max},
            "k": self.k,
            "n": graph.n,
            "edges": graph.n_edges,
            "clusters": list(self.partition.labels),
            "cluster_sizes": self.partition.sizes(),
            "peaks": [
                {"omega": p.omega, "lambda": p.eigenvalue, "bin_omega": p.bin_omega}
                for p in self.estimate.peaks
            ],
            "eigenvalue_tolerance": self.estimate.eigenvalue_tolerance,
            "flags": self.flags(),
            "messages_scalar": self.messages,
            "oracle": self.oracle,
        }
        if graph.node_names is not None:
            result["node_names"] = list(graph.node_names)
        return result


@dataclass
class BisectionResult:
    """Leaves of a recursive two-way split, as one partition plus the split tree."""

    partition: Partition
    tree: List[Dict[str, Any]]

    def to_dict(self) -> Dict[str, Any]:
        return {"clusters": list(self.partition.labels), "tree": self.tree}


class WaveClusterer:
    """Cluster graphs from the oscillation frequencies of the graph wave equation."""

    MIN_CLUSTER_SIZE = 4

    def __init__(self, config: Optional[Config] = None):
        """
        Initialize the clusterer.

        Args:
            config: Run defaults (wave speed, horizon limits, tolerances)
        """
        self.config = config or Config()

    def wave_config(self, seed: Optional[int] = None, t_max: int = 0) -> WaveConfig:
        cfg = self.config
        return WaveConfig.from_c2(
            cfg.c2,
            t_max=t_max,
            seed=cfg.seed if seed is None else seed,
            eta=cfg.eta,
            divergence_guard=cfg.divergence_guard,
        )

    def check_horizon(
        self, history: np.ndarray, weights: np.ndarray, estimate: EigenEstimate, needed: int
    ) -> HorizonCheck:
        """
        Compare every peak of ``estimate`` against the first half of the history.

        The half-history frequency is refined from the full-horizon one; its
        eigenvalue must agree within one bin of the full horizon. The
        coefficient signs at the full-horizon frequency must not change.
        """
        horizon = history.shape[1]
        half = history[:, : horizon // 2]
        resolution = 2.0 * math.pi / half.shape[1]
        drift = 0.0
        flips = 0
        for peak in estimate.peaks:
            omega_half = refine_frequency(half, weights, peak.omega, resolution)
            lambda_half = frequency_to_eigenvalue(omega_half, estimate.c)
            drift = max(drift, abs(peak.eigenvalue - lambda_half))
            flips = max(flips, sign_flips(peak, coefficients_at(half, peak.omega)))
        return HorizonCheck(
            horizon=horizon,
            eigenvalue_drift=drift,
            eigenvalue_tolerance=estimate.eigenvalue_tolerance,
            sign_flips=flips,
            needed=needed,
        )

    def simulate(
        self,
        g: Graph,
        k: int,
        t_max: Optional[int] = None,
        seed: Optional[int] = None,
        u0: Optional[np.ndarray] = None,
    ) -> Tuple[WaveRun, EigenEstimate, List[int], List[HorizonCheck]]:
        """
        Run the wave equation until k peaks are resolved.

        Without ``t_max`` the horizon starts at config.min_t_max and doubles
        until the first half of the history agrees with the full history on
        every peak (eigenvalues within one bin, unchanged coefficient signs)
        and the horizon covers oversample x the suggested T_max. A given
        ``t_max`` is rounded up to a power of two and used as is.

        Returns:
            (run, estimate, horizons tried, half-horizon checks); a fixed
            horizon has no checks

        Raises:
            BudgetExceededError: Horizon would pass config.max_t_max
            InsufficientPeaksError, NoisyFloorError: With a fixed t_max only
        """
        cfg = self.config
        forced = t_max is not None
        horizon = next_power_of_two(t_max if forced else cfg.min_t_max)
        run = init_run(g, self.wave_config(seed, horizon), u0=u0)
        weights = np.asarray(g.degrees, dtype=float)
        tried: List[int] = []
        checks: List[HorizonCheck] = []

        while True:
            if not forced and horizon > cfg.max_t_max:
                raise BudgetExceededError(
                    f"horizon {horizon} exceeds the budget of {cfg.max_t_max} rounds "
                    f"(tried {tried})"
                )
            run_to(run, horizon - run.t)
            tried.append(horizon)
            history = run.history

            try:
                estimate = estimate_eigenpairs(
                    history, weights, k, run.config.c, zero_tolerance=cfg.zero_tolerance
                )
            except (InsufficientPeaksError, NoisyFloorError) as e:
                if forced:
                    raise
                logger.info(f"Horizon {horizon}: {e}; doubling")
                horizon *= 2
                continue

            if forced:
                break

            lambda2_hat = min(estimate.eigenvalues[0], 2.0)
            needed = next_power_of_two(
                cfg.oversample * suggest_rounds(lambda2_hat, run.config.c, run.config.eta)
            )
            check = self.check_horizon(history, weights, estimate, needed)
            checks.append(check)
            logger.debug(
                f"Horizon {horizon}: lambda_2~{lambda2_hat:.6g}, "
                f"drift {check.eigenvalue_drift:.3g} (tolerance {check.eigenvalue_tolerance:.3g}), "
                f"{check.sign_flips} sign flip(s), needed {needed}"
            )
            if check.settled:
                break
            horizon = max(2 * horizon, needed)

        logger.info(
            f"Wave run on {g!r}: T_max={run.t}, "
            + ", ".join(f"lambda_{j + 2}~{lam:.6g}" for j, lam in enumerate(estimate.eigenvalues))
        )
        return run, estimate, tried, checks

    def _repair_zero_components(
        self, g: Graph, estimate: EigenEstimate, signs: np.ndarray
    ) -> Dict[int, List[int]]:
        """Give nodal-line nodes the weighted majority sign of their neighbors."""
        repaired: Dict[int, List[int]] = {}
        for j, peak in enumerate(estimate.peaks):
            if not peak.zero_nodes:
                continue
            zero = set(peak.zero_nodes)
            for i in peak.zero_nodes:
                vote = sum(w * signs[nb, j] for nb, w in g.neighbors(i) if nb not in zero)
                signs[i, j] = 1 if vote >= 0 else -1
            repaired[j] = list(peak.zero_nodes)
            logger.warning(
                f"{len(zero)} node(s) on a nodal line of peak {j + 1} "
                f"(omega={peak.omega:.6g}) assigned by neighbor majority: "
                f"{sorted(zero)[:10]}"
            )
        return repaired

    def _oracle_check(
        self, g: Graph, k: int, partition: Partition, estimate: EigenEstimate
    ) -> Dict[str, Any]:
        ds = dense_spectral(g, dense_limit=self.config.dense_limit)
        reference = oracle_partition(ds, k)
        comparison = compare_partitions(partition, reference)
        exact = [float(x) for x in ds.eigenvalues[1 : k + 1]]
        errors = [abs(a - b) for a, b in zip(estimate.eigenvalues, exact)]
        logger.info(
            f"Oracle agreement {comparison['agreement']:.4f}, "
            f"max eigenvalue error {max(errors):.3g}"
        )
        return {
            "agreement": comparison["agreement"],
            "exact_up_to_permutation": comparison["exact_up_to_permutation"],
            "clusters": list(reference.labels),
            "eigenvalues": exact,
            "eigenvalue_errors": errors,
            "degenerate_eigengap": is_degenerate(ds, k),
            "eigengap": eigengap_report(ds),
        }

    def cluster(
        self,
        g: Graph,
        k: int = 1,
        t_max: Optional[int] = None,
        seed: Optional[int] = None,
        u0: Optional[np.ndarray] = None,
        compare_oracle: bool = True,
    ) -> ClusterResult:
        """
        Cluster g from the signs of its k lowest non-trivial eigenvectors.

        Args:
            g: Connected graph
            k: Number of eigenvectors; up to 2^k clusters
            t_max: Fixed horizon (rounded up to a power of two)
            seed: Seed overriding config.seed
            u0: Explicit initial condition
            compare_oracle: Check against the dense oracle when g.n <= dense_limit

        Returns:
            ClusterResult
        """
        if not 1 <= k < g.n:
            raise ValidationError(f"k must lie in [1, {g.n - 1}], got {k}")

        run, estimate, horizons, checks = self.simulate(g, k, t_max=t_max, seed=seed, u0=u0)
        signs = estimate.sign_matrix()
        repaired = self._repair_zero_components(g, estimate, signs)
        partition = assign_clusters(signs)
        logger.info(f"Partition of {g!r}: {partition.k} clusters, sizes {partition.sizes()}")

        oracle = None
        if compare_oracle and g.n <= self.config.dense_limit:
            oracle = self._oracle_check(g, k, partition, estimate)

        return ClusterResult(
            partition=partition,
            estimate=estimate,
            t_max=run.t,
            run=run,
            horizons=horizons,
            repaired=repaired,
            oracle=oracle,
            checks=checks,
        )

    def bisect(
        self,
        g: Graph,
        depth: int = 2,
        min_cluster_size: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> BisectionResult:
        """
        Split recursively: cut with k=1, then rerun independently on each side.

        Parts that are too small, disconnected, or not split further by the
        wave cut become leaves.

        Args:
            g: Connected graph
            depth: Maximum number of split levels
            min_cluster_size: Smallest part that is split again, at least 2
            seed: Seed overriding config.seed
        """
        if depth < 1:
            raise ValidationError(f"depth must be at least 1, got {depth}")
        min_size = self.MIN_CLUSTER_SIZE if min_cluster_size is None else min_cluster_size
        if min_size < 2:
            raise ValidationError(f"min_cluster_size must be at least 2, got {min_size}")
        leaf_of = [""] * g.n
        tree: List[Dict[str, Any]] = []

        def leaf(nodes: List[int], path: str) -> None:
            for i in nodes:
                leaf_of[i] = path

        def split(nodes: List[int], path: str, level: int) -> None:
            entry: Dict[str, Any] = {"path": path or "root", "size": len(nodes)}
            tree.append(entry)
            if level >= depth or len(nodes) < min_size:
                leaf(nodes, path)
                return
            sub = g if level == 0 else g.subgraph(nodes)
            if not sub.is_connected():
                leaf(nodes, path)
                return
            result = self.cluster(sub, k=1, seed=seed, compare_oracle=False)
            entry["lambda2"] = result.estimate.eigenvalues[0]
            if result.partition.k < 2:
                leaf(nodes, path)
                return
            for label in range(result.partition.k):
                child = [nodes[i] for i in result.partition.members(label)]
                split(child, path + str(label), level + 1)

        split(list(range(g.n)), "", 0)
        partition = Partition.from_labels(leaf_of)
        logger.info(f"Bisection of {g!r} to depth {depth}: {partition.k} leaves")
        return BisectionResult(partition=partition, tree=tree)
