"""
Discretized wave equation on a graph.

Every node keeps its last two values and updates synchronously:

    u_i(t) = 2 u_i(t-1) - u_i(t-2) - c^2 * sum_j L_ij u_j(t-1)

where the sum runs over the node itself and its neighbors. With
u(-1) = u(0) and 0 < c < sqrt(2) every Laplacian mode oscillates forever at
frequency omega_j with cos(omega_j) = (2 - c^2 lambda_j) / 2, which is what
the spectral analysis reads back out of the per-node histories.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import pandas as pd

from .exceptions import (
    DisconnectedGraphError,
    DomainError,
    InvalidSpeedError,
    NumericalDivergenceError,
    ValidationError,
)
from .graph import Graph

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

# Reads of u_j(t-1) by node i during a local step: observer(i, j).
ReadObserver = Callable[[int, int], None]


@dataclass(frozen=True)
class WaveConfig:
    """Wave run parameters."""

    c: float = math.sqrt(1.99)
    t_max: int = 4096
    seed: int = 0
    eta: float = 7.0
    divergence_guard: float = 1e6

    @classmethod
    def from_c2(cls, c2: float, **kwargs) -> "WaveConfig":
        """Build from the squared wave speed."""
        if c2 <= 0:
            raise InvalidSpeedError(f"c^2 must be positive, got {c2}")
        return cls(c=math.sqrt(c2), **kwargs)

    @property
    def c2(self) -> float:
        return self.c * self.c

    def with_t_max(self, t_max: int) -> "WaveConfig":
        return replace(self, t_max=int(t_max))

    def validate(self) -> "WaveConfig":
        """
        Check the stability condition and argument ranges.

        Raises:
            InvalidSpeedError: If c is not in (0, sqrt(2))
            ValidationError: For non-positive eta, guard or negative t_max
        """
        if not (0.0 < self.c < SQRT2) or not math.isfinite(self.c):
            raise InvalidSpeedError(
                f"wave speed c={self.c:.6g} (c^2={self.c2:.6g}) must satisfy 0 < c < sqrt(2)"
            )
        if self.t_max < 0:
            raise ValidationError(f"t_max must be non-negative, got {self.t_max}")
        if self.eta <= 0:
            raise ValidationError(f"eta must be positive, got {self.eta}")
        if self.divergence_guard <= 1:
            raise ValidationError(
                f"divergence guard must exceed 1, got {self.divergence_guard}"
            )
        return self


@dataclass(frozen=True)
class NodeWaveState:
    """Read-only view of one node's recurrence state and history."""

    node: int
    u_prev: float
    u_prev2: float
    history: np.ndarray

    @property
    def rounds(self) -> int:
        return int(self.history.size)


class WaveRun:
    """
    State of one wave simulation.

    The run owns an N x capacity history buffer holding u(1..t) column by
    column; it grows by doubling. With ``keep_history=False`` only the
    per-round amplitude max_i |u_i(t)| is recorded.
    """

    def __init__(
        self,
        graph: Graph,
        config: WaveConfig,
        u0: np.ndarray,
        u_minus1: Optional[np.ndarray] = None,
        keep_history: bool = True,
    ):
        """
        Create a run without validating the wave speed.

        init_run is the checked entry point; constructing a WaveRun directly
        allows deliberately unstable settings.

        Args:
            graph: Graph to simulate on
            config: Wave parameters
            u0: Initial values u(0), one per node
            u_minus1: Values u(-1); defaults to u0
            keep_history: Record full per-node histories
        """
        u0 = np.asarray(u0, dtype=float)
        if u0.shape != (graph.n,):
            raise ValidationError(f"u0 has shape {u0.shape}, expected ({graph.n},)")
        self.graph = graph
        self.config = config
        self.keep_history = keep_history
        self.t = 0
        self.u0 = u0.copy()
        self._u = u0.copy()
        self._u_prev = (
            u0.copy() if u_minus1 is None else np.asarray(u_minus1, dtype=float).copy()
        )
        self._laplacian = graph.laplacian_matrix()
        self._history = np.empty((graph.n, 0))
        self._amplitudes = [float(np.max(np.abs(u0))) if u0.size else 0.0]
        self.initial_amplitude = self._amplitudes[0] or 1.0

    @property
    def u(self) -> np.ndarray:
        """Current values u(t)."""
        return self._u.copy()

    @property
    def u_prev(self) -> np.ndarray:
        """Values u(t-1)."""
        return self._u_prev.copy()

    @property
    def history(self) -> np.ndarray:
        """N x t array of u(1..t); empty when histories are not kept."""
        if not self.keep_history:
            return np.empty((self.graph.n, 0))
        return self._history[:, : self.t]

    @property
    def amplitudes(self) -> np.ndarray:
        """max_i |u_i(s)| for s = 0..t."""
        return np.asarray(self._amplitudes)

    def node(self, i: int) -> NodeWaveState:
        """State view of node i."""
        hist = self.history[i] if self.keep_history else np.empty(0)
        return NodeWaveState(
            node=i,
            u_prev=float(self._u[i]),
            u_prev2=float(self._u_prev[i]),
            history=hist,
        )

    def reserve(self, rounds: int) -> None:
        """Make room for ``rounds`` more history columns."""
        if not self.keep_history:
            return
        needed = self.t + rounds
        capacity = self._history.shape[1]
        if needed <= capacity:
            return
        new_capacity = max(needed, 2 * capacity, 16)
        grown = np.empty((self.graph.n, new_capacity))
        grown[:, : self.t] = self._history[:, : self.t]
        self._history = grown

    def _local_update(self, observer: Optional[ReadObserver]) -> np.ndarray:
        c2 = self.config.c2
        new = np.empty_like(self._u)
        for i in range(self.graph.n):
            acc = 0.0
            for j, value in self.graph.laplacian_row(i).entries:
                if observer is not None:
                    observer(i, j)
                acc += value * self._u[j]
            new[i] = 2.0 * self._u[i] - self._u_prev[i] - c2 * acc
        return new

    def advance(self, local: bool = False, observer: Optional[ReadObserver] = None) -> None:
        """One synchronous round; see step()."""
        if local:
            new = self._local_update(observer)
        else:
            new = 2.0 * self._u - self._u_prev - self.config.c2 * (self._laplacian @ self._u)

        amplitude = float(np.max(np.abs(new)))
        if not math.isfinite(amplitude) or (
            amplitude > self.config.divergence_guard * self.initial_amplitude
        ):
            raise NumericalDivergenceError(
                f"wave amplitude {amplitude:.3g} at round {self.t + 1} exceeds "
                f"{self.config.divergence_guard:.3g} x initial amplitude "
                f"{self.initial_amplitude:.3g} (c^2={self.config.c2:.6g})"
            )

        self._u_prev, self._u = self._u, new
        if self.keep_history:
            self.reserve(1)
            self._history[:, self.t] = new
        self.t += 1
        self._amplitudes.append(amplitude)


def initial_values(n: int, seed: int) -> np.ndarray:
    """u_i(0) ~ Uniform[0, 1], drawn in node-id order."""
    return np.random.default_rng(seed).uniform(0.0, 1.0, n)


def init_run(
    g: Graph,
    cfg: WaveConfig,
    u0: Optional[np.ndarray] = None,
    keep_history: bool = True,
) -> WaveRun:
    """
    Start a wave run with u(-1) = u(0).

    Args:
        g: Connected graph
        cfg: Wave parameters; validated here
        u0: Explicit initial values; drawn from the seeded RNG when omitted
        keep_history: Record full per-node histories

    Returns:
        WaveRun at t = 0

    Raises:
        InvalidSpeedError, DisconnectedGraphError
    """
    cfg.validate()
    if not g.is_connected():
        raise DisconnectedGraphError(
            f"wave clustering needs a connected graph; got {len(g.components())} components"
        )
    if u0 is None:
        u0 = initial_values(g.n, cfg.seed)
    run = WaveRun(g, cfg, u0, keep_history=keep_history)
    logger.debug(f"Initialized wave run on {g!r}, c^2={cfg.c2:.6g}, seed={cfg.seed}")
    return run


def step(
    run: WaveRun, local: bool = False, observer: Optional[ReadObserver] = None
) -> WaveRun:
    """
    Advance every node by one synchronous round.

    All nodes read round t-1 values only. ``local=True`` runs the per-node
    update that reads neighbor values one at a time through ``observer``.

    Raises:
        NumericalDivergenceError: If an amplitude passes the divergence guard
    """
    run.advance(local=local, observer=observer)
    return run


def run_to(run: WaveRun, t_max: int) -> WaveRun:
    """Apply step ``t_max`` more times."""
    if t_max < 0:
        raise ValidationError(f"round count must be non-negative, got {t_max}")
    run.reserve(t_max)
    for _ in range(t_max):
        run.advance()
    return run


def eigenvalue_to_frequency(lambda_: float, c: float) -> float:
    """omega with cos(omega) = (2 - c^2 lambda) / 2."""
    arg = (2.0 - c * c * lambda_) / 2.0
    if not -1.0 - 1e-12 <= arg <= 1.0 + 1e-12:
        raise DomainError(
            f"arccos argument {arg:.6g} outside [-1, 1] for lambda={lambda_}, c^2={c * c:.6g}"
        )
    return math.acos(min(1.0, max(-1.0, arg)))


def suggest_rounds(lambda2_estimate: float, c: float, eta: float) -> float:
    """eta cycles of the lowest oscillation, in rounds (unrounded)."""
    if not 0.0 < lambda2_estimate <= 2.0:
        raise DomainError(f"lambda_2 estimate must lie in (0, 2], got {lambda2_estimate}")
    omega2 = eigenvalue_to_frequency(lambda2_estimate, c)
    if omega2 <= 0:
        raise DomainError(f"lowest frequency is zero for lambda_2={lambda2_estimate}")
    return eta * 2.0 * math.pi / omega2


def next_power_of_two(x: float) -> int:
    """Smallest power of two >= x (and >= 1)."""
    target = max(1, int(math.ceil(x)))
    return 1 << (target - 1).bit_length()


def suggest_t_max(lambda2_estimate: float, c: float, eta: float = 7.0) -> int:
    """
    Rounds needed to resolve the lowest Laplacian frequency.

    ceil(eta * 2 pi / arccos((2 - c^2 lambda_2) / 2)) rounded up to a power
    of two.

    Raises:
        DomainError: If lambda_2 is outside (0, 2] or the arccos argument
            leaves [-1, 1]
    """
    return next_power_of_two(suggest_rounds(lambda2_estimate, c, eta))


def detect_growth(amplitudes: np.ndarray, ratio: float = 3.0) -> bool:
    """
    True when the amplitude envelope grows over the run.

    Compares the peak amplitude over the final eighth of the rounds with the
    peak over the first eighth.
    """
    amps = np.asarray(amplitudes, dtype=float)
    if amps.size < 16:
        raise ValidationError(f"need at least 16 rounds to judge growth, got {amps.size}")
    window = amps.size // 8
    early = float(np.max(amps[:window]))
    late = float(np.max(amps[-window:]))
    if early == 0.0:
        return late > 0.0
    return late / early >= ratio


def trajectory_frame(run: WaveRun) -> pd.DataFrame:
    """Long-format trajectory with columns t, node, u for t = 0..run.t."""
    if not run.keep_history:
        raise ValidationError("trajectory needs a run with keep_history=True")
    values = np.column_stack([run.u0, run.history])
    n, rounds = values.shape
    return pd.DataFrame(
        {
            "t": np.repeat(np.arange(rounds), n),
            "node": np.tile(np.arange(n), rounds),
            "u": values.T.ravel(),
        }
    )
