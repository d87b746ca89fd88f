"""
Convergence predictions and measurements.

Closed-form round counts for the wave method and the random-walk (heat /
gossip) baseline, plus the empirical measurements that check their scaling
on ring graphs.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .clustering import WaveClusterer
from .comparison import compare_partitions
from .config import Config
from .exceptions import (
    BudgetExceededError,
    DomainError,
    InsufficientPeaksError,
    InvalidSpeedError,
    MixingTimeUndefinedError,
    NoisyFloorError,
    TooShortError,
    ValidationError,
)
from .gossip import default_gossip_steps, orthogonal_iteration_distributed
from .graph import Graph, Partition
from .oracle import dense_spectral, oracle_partition
from .spectral import consensus_spectrum, find_peaks, refine_frequency
from .wave import SQRT2, WaveConfig, init_run, initial_values, next_power_of_two, run_to

logger = logging.getLogger(__name__)

MIN_WAVE_HORIZON = 16
# The shortest window must see the lowest peak at least this many bins above dc
MIN_PEAK_BINS = 2


def mixing_time(lambda2: float) -> float:
    """
    tau = -1 / ln(1 - lambda_2).

    Raises:
        MixingTimeUndefinedError: lambda_2 >= 1
        DomainError: lambda_2 <= 0
    """
    if lambda2 <= 0:
        raise DomainError(f"lambda_2 must be positive, got {lambda2}")
    if lambda2 >= 1:
        raise MixingTimeUndefinedError(
            f"mixing time is undefined for lambda_2={lambda2} >= 1"
        )
    return -1.0 / math.log(1.0 - lambda2)


def ring_lambda2(n: int) -> float:
    """Second Laplacian eigenvalue of the cycle C_n: 1 - cos(2 pi / n)."""
    return 1.0 - math.cos(2.0 * math.pi / n)


def ring_mixing_time(n: int) -> float:
    """Mixing time of C_n, -1 / ln cos(2 pi / n); about 2 (n / 2 pi)^2 for large n."""
    return mixing_time(ring_lambda2(n))


@dataclass(frozen=True)
class ConvergencePredictor:
    """Predicted rounds for the wave and gossip methods."""

    lambda2: float
    c: float
    eta: float
    n: int
    tau: float
    omega2: float
    t_resolve: float
    t_wave: float
    t_gossip: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def predict_times(lambda2: float, c: float, eta: float, n: int) -> ConvergencePredictor:
    """
    Closed-form convergence predictions.

    omega_2 = arccos((2 + c^2 (e^(-1/tau) - 1)) / 2), T_wave = eta 2 pi / omega_2 + N
    (resolving eta cycles, then gathering), T_gossip = tau ln^2 N.

    Raises:
        DomainError: lambda_2 outside (0, 2)
        InvalidSpeedError: c outside (0, sqrt(2))
        MixingTimeUndefinedError: lambda_2 >= 1
    """
    if not 0.0 < lambda2 < 2.0:
        raise DomainError(f"lambda_2 must lie in (0, 2), got {lambda2}")
    if not 0.0 < c < SQRT2:
        raise InvalidSpeedError(f"c must lie in (0, sqrt(2)), got {c}")
    if n < 2:
        raise ValidationError(f"n must be at least 2, got {n}")
    if eta <= 0:
        raise ValidationError(f"eta must be positive, got {eta}")

    tau = mixing_time(lambda2)
    omega2 = math.acos((2.0 + c * c * (math.exp(-1.0 / tau) - 1.0)) / 2.0)
    t_resolve = eta * 2.0 * math.pi / omega2
    return ConvergencePredictor(
        lambda2=lambda2,
        c=c,
        eta=eta,
        n=n,
        tau=tau,
        omega2=omega2,
        t_resolve=t_resolve,
        t_wave=t_resolve + n,
        t_gossip=tau * math.log(n) ** 2,
    )


def _lowest_refined_peak(history: np.ndarray, weights: np.ndarray) -> Tuple[int, float]:
    """Bin index and refined frequency of the lowest consensus peak."""
    spec = consensus_spectrum(history, weights)
    omega = find_peaks(spec, 1)[0]
    return spec.bin_index(omega), refine_frequency(history, weights, omega, spec.resolution)


def measure_wave_rounds(g: Graph, config: Optional[Config] = None) -> int:
    """
    Smallest power-of-two horizon T at which the wave method has converged.

    The search starts at max(16, 4N) rounds. Converged means the lowest
    refined peak frequency is stable over two consecutive doublings (the
    windows T/4, T/2 and T agree pairwise within one bin of the longer
    window), the T/4 window sees that peak at least two bins above dc, and
    T covers eta cycles of it.

    Raises:
        BudgetExceededError: Not converged within config.max_t_max rounds
    """
    config = config or Config()
    cfg = WaveConfig.from_c2(config.c2, seed=config.seed, eta=config.eta)
    run = init_run(g, cfg)
    weights = np.asarray(g.degrees, dtype=float)
    horizon = max(MIN_WAVE_HORIZON, next_power_of_two(4 * g.n))

    while horizon <= config.max_t_max:
        run_to(run, horizon - run.t)
        history = run.history
        windows = [horizon // 4, horizon // 2, horizon]
        try:
            peaks = [_lowest_refined_peak(history[:, :w], weights) for w in windows]
        except (InsufficientPeaksError, NoisyFloorError, TooShortError):
            horizon *= 2
            continue
        omegas = [omega for _, omega in peaks]
        stable = all(
            abs(omegas[i + 1] - omegas[i]) <= 2.0 * math.pi / windows[i + 1] for i in range(2)
        )
        resolved = peaks[0][0] >= MIN_PEAK_BINS
        covered = horizon >= config.eta * 2.0 * math.pi / omegas[-1]
        logger.debug(
            f"horizon {horizon}: omega={omegas[-1]:.6g} (windows {omegas}), "
            f"stable={stable}, resolved={resolved}, covered={covered}"
        )
        if stable and resolved and covered:
            return horizon
        horizon *= 2

    raise BudgetExceededError(
        f"wave method not converged within {config.max_t_max} rounds on {g!r}"
    )


def measure_heat_rounds(g: Graph, config: Optional[Config] = None) -> int:
    """
    Rounds of the lazy heat iteration u <- u - L u / 2 until consensus.

    Stops once ||u(t) - m 1||_inf <= heat_tolerance * ||u(0)||_inf, where m is
    the degree-weighted mean that the iteration preserves.

    Raises:
        BudgetExceededError: Not converged within config.max_t_max rounds
    """
    config = config or Config()
    lap = g.laplacian_matrix()
    d = np.asarray(g.degrees, dtype=float)
    u = initial_values(g.n, config.seed)
    target = float(d @ u / d.sum())
    bound = config.heat_tolerance * float(np.max(np.abs(u)))

    for t in range(config.max_t_max + 1):
        if float(np.max(np.abs(u - target))) <= bound:
            return t
        u = u - 0.5 * (lap @ u)

    raise BudgetExceededError(
        f"heat iteration not converged within {config.max_t_max} rounds on {g!r}"
    )


def measure_convergence(g: Graph, method: str, config: Optional[Config] = None) -> int:
    """
    Measured rounds to convergence for ``method`` in {"wave", "heat"}.

    Raises:
        ValidationError: Unknown method
        BudgetExceededError: Budget exhausted
    """
    if method == "wave":
        return measure_wave_rounds(g, config)
    if method == "heat":
        return measure_heat_rounds(g, config)
    raise ValidationError(f"unknown method {method!r}; choose 'wave' or 'heat'")


def fit_power_law(xs: Iterable[float], ys: Iterable[float]) -> Tuple[float, float]:
    """
    Least-squares fit of y = a x^p in log-log space.

    Returns:
        (a, p)
    """
    x = np.log(np.asarray(list(xs), dtype=float))
    y = np.log(np.asarray(list(ys), dtype=float))
    if x.size < 2:
        raise ValidationError("power-law fit needs at least two points")
    slope, intercept = np.polyfit(x, y, 1)
    return float(math.exp(intercept)), float(slope)


def convergence_sweep(
    family: str, sizes: Iterable[int], config: Optional[Config] = None
) -> pd.DataFrame:
    """
    Measured wave and heat rounds for each graph size of a family.

    Returns:
        DataFrame with columns N, wave_rounds, heat_rounds
    """
    from .generators import from_spec

    config = config or Config()
    rows = []
    for n in sizes:
        g = from_spec(f"{family}:{int(n)}", seed=config.seed)
        wave_rounds = measure_convergence(g, "wave", config)
        heat_rounds = measure_convergence(g, "heat", config)
        logger.info(f"{family} N={n}: wave {wave_rounds} rounds, heat {heat_rounds} rounds")
        rows.append({"N": int(n), "wave_rounds": wave_rounds, "heat_rounds": heat_rounds})
    return pd.DataFrame(rows, columns=["N", "wave_rounds", "heat_rounds"])


def compare_methods(
    g: Graph,
    k: int = 1,
    config: Optional[Config] = None,
    rounds: int = 300,
    gossip_steps: Optional[int] = None,
    graph_label: str = "",
) -> List[Dict[str, Any]]:
    """
    Rounds, scalar messages and oracle agreement of the wave method and its baselines.

    Methods are the wave clusterer, gossip orthogonal iteration with k + 1
    columns, and the heat iteration (consensus only, so no partition).
    Agreement is measured against the dense oracle and is None when g has
    more than config.dense_limit nodes.

    Args:
        g: Connected graph
        k: Sign bits for the wave method; non-constant columns for the baseline
        config: Run settings
        rounds: Orthogonal-iteration rounds
        gossip_steps: Push-sum steps per round; None uses ceil(tau log^2 N)
            from the wave estimate of lambda_2, 0 uses exact sums
        graph_label: Value of the ``graph`` field of every report

    Returns:
        One {graph, method, rounds, messages_scalar_equiv, partition_agreement}
        report per method
    """
    config = config or Config()
    if gossip_steps is not None and gossip_steps < 0:
        raise ValidationError(f"gossip_steps must be non-negative, got {gossip_steps}")
    wave = WaveClusterer(config).cluster(g, k=k, compare_oracle=False)
    lambda2 = wave.estimate.eigenvalues[0]
    if gossip_steps is None:
        gossip_steps = default_gossip_steps(g, lambda2)
    baseline = orthogonal_iteration_distributed(
        g, k + 1, rounds=rounds, gossip_steps=gossip_steps, seed=config.seed, lambda2=lambda2
    )
    heat_rounds = measure_heat_rounds(g, config)

    reference = None
    if g.n <= config.dense_limit:
        reference = oracle_partition(dense_spectral(g, dense_limit=config.dense_limit), k)

    def agreement(partition: Partition) -> Optional[float]:
        if reference is None:
            return None
        return compare_partitions(partition, reference)["agreement"]

    rows = [
        ("wave", wave.t_max, wave.messages, agreement(wave.partition)),
        (
            "orthogonal_iteration",
            baseline.communication_rounds,
            baseline.messages,
            agreement(baseline.partition()),
        ),
        ("heat", heat_rounds, 2 * g.n_edges * heat_rounds, None),
    ]
    reports = [
        {
            "graph": graph_label or repr(g),
            "method": method,
            "rounds": int(method_rounds),
            "messages_scalar_equiv": int(messages),
            "partition_agreement": agree,
        }
        for method, method_rounds, messages, agree in rows
    ]
    for report in reports:
        logger.info(
            f"{report['method']}: {report['rounds']} rounds, "
            f"{report['messages_scalar_equiv']} scalars, agreement {report['partition_agreement']}"
        )
    return reports
