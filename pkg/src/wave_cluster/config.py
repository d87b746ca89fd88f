"""
Configuration management for wave-cluster.

This module holds run defaults (wave speed, horizon limits, tolerances,
output location) and lets the environment override them.
"""

import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from .exceptions import ValidationError


class Config:
    """Configuration manager for wave-cluster."""

    DEFAULT_OUT_DIR = "results"
    DEFAULT_DENSE_LIMIT = 4096  # nodes
    DEFAULT_C2 = 1.99
    DEFAULT_ETA = 7.0  # cycles of the lowest frequency
    DEFAULT_SEED = 0
    DEFAULT_MIN_T_MAX = 4096  # rounds
    DEFAULT_MAX_T_MAX = 2 ** 20  # rounds
    DEFAULT_OVERSAMPLE = 8
    DEFAULT_DIVERGENCE_GUARD = 1e6
    DEFAULT_ZERO_TOLERANCE = 1e-6
    DEFAULT_HEAT_TOLERANCE = 1e-3

    ENV_PREFIX = "WAVE_CLUSTER_"

    def __init__(
        self,
        out_dir: Optional[str] = None,
        dense_limit: Optional[int] = None,
        c2: Optional[float] = None,
        eta: Optional[float] = None,
        seed: Optional[int] = None,
        min_t_max: Optional[int] = None,
        max_t_max: Optional[int] = None,
        oversample: Optional[int] = None,
        divergence_guard: Optional[float] = None,
        zero_tolerance: Optional[float] = None,
        heat_tolerance: Optional[float] = None,
    ):
        """
        Initialize configuration.

        Args:
            out_dir: Directory receiving JSON/CSV outputs
            dense_limit: Largest node count handed to the dense oracle
            c2: Squared wave speed c^2
            eta: Number of lowest-frequency cycles to record
            seed: Seed for initial conditions and generators
            min_t_max: First horizon tried by the automatic horizon search
            max_t_max: Horizon budget; exceeding it is an error
            oversample: Horizon multiple of the suggested T_max
            divergence_guard: Amplitude ratio treated as divergence
            zero_tolerance: Relative magnitude below which a coefficient has no sign
            heat_tolerance: Relative consensus error ending a heat run
        """
        self.out_dir = Path(out_dir if out_dir is not None else self.DEFAULT_OUT_DIR)
        self.dense_limit = _pick(dense_limit, self.DEFAULT_DENSE_LIMIT)
        self.c2 = _pick(c2, self.DEFAULT_C2)
        self.eta = _pick(eta, self.DEFAULT_ETA)
        self.seed = _pick(seed, self.DEFAULT_SEED)
        self.min_t_max = _pick(min_t_max, self.DEFAULT_MIN_T_MAX)
        self.max_t_max = _pick(max_t_max, self.DEFAULT_MAX_T_MAX)
        self.oversample = _pick(oversample, self.DEFAULT_OVERSAMPLE)
        self.divergence_guard = _pick(divergence_guard, self.DEFAULT_DIVERGENCE_GUARD)
        self.zero_tolerance = _pick(zero_tolerance, self.DEFAULT_ZERO_TOLERANCE)
        self.heat_tolerance = _pick(heat_tolerance, self.DEFAULT_HEAT_TOLERANCE)

        if not 0.0 < self.c2 < 2.0:
            raise ValidationError(f"c2 must lie in (0, 2), got {self.c2}")
        if self.eta <= 0:
            raise ValidationError(f"eta must be positive, got {self.eta}")
        if self.min_t_max > self.max_t_max:
            raise ValidationError(
                f"min_t_max ({self.min_t_max}) exceeds max_t_max ({self.max_t_max})"
            )

    @property
    def c(self) -> float:
        """Wave speed c = sqrt(c2)."""
        return self.c2 ** 0.5

    @classmethod
    def from_env(cls, **overrides: Any) -> "Config":
        """
        Create configuration from environment variables.

        Environment variables:
            WAVE_CLUSTER_OUT_DIR: Output directory
            WAVE_CLUSTER_DENSE_LIMIT: Dense oracle node limit
            WAVE_CLUSTER_C2: Squared wave speed
            WAVE_CLUSTER_ETA: Cycles of the lowest frequency
            WAVE_CLUSTER_SEED: RNG seed
            WAVE_CLUSTER_MIN_T_MAX / WAVE_CLUSTER_MAX_T_MAX: Horizon bounds
            WAVE_CLUSTER_OVERSAMPLE: Horizon multiple
            WAVE_CLUSTER_DIVERGENCE_GUARD: Divergence amplitude ratio
            WAVE_CLUSTER_ZERO_TOLERANCE: Nodal-line tolerance
            WAVE_CLUSTER_HEAT_TOLERANCE: Heat consensus tolerance

        Keyword overrides that are not None win over the environment.

        Returns:
            Config instance populated from environment
        """
        parsers: Dict[str, Callable[[str], Any]] = {
            "out_dir": str,
            "dense_limit": int,
            "c2": float,
            "eta": float,
            "seed": int,
            "min_t_max": int,
            "max_t_max": int,
            "oversample": int,
            "divergence_guard": float,
            "zero_tolerance": float,
            "heat_tolerance": float,
        }
        values: Dict[str, Any] = {}
        for name, parse in parsers.items():
            raw = os.getenv(cls.ENV_PREFIX + name.upper())
            if raw:
                try:
                    values[name] = parse(raw)
                except ValueError as e:
                    raise ValidationError(
                        f"Bad value for {cls.ENV_PREFIX + name.upper()}: {raw!r}"
                    ) from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def ensure_out_dir(self) -> Path:
        """Create the output directory if needed and return it."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert configuration to dictionary.

        Returns:
            Dictionary representation of configuration
        """
        return {
            "out_dir": str(self.out_dir),
            "dense_limit": self.dense_limit,
            "c2": self.c2,
            "eta": self.eta,
            "seed": self.seed,
            "min_t_max": self.min_t_max,
            "max_t_max": self.max_t_max,
            "oversample": self.oversample,
            "divergence_guard": self.divergence_guard,
            "zero_tolerance": self.zero_tolerance,
            "heat_tolerance": self.heat_tolerance,
        }


def _pick(value: Any, default: Any) -> Any:
    return default if value is None else value
