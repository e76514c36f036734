from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import math
import typing as t

log = logging.getLogger("levy_toolbox.montecarlo.classes")

from levy_toolbox.exc import PreconditionError

from .constants import (
    CHUNK_SIZE,
    DEFAULT_DT,
    DEFAULT_JUMP_CUT,
    DEFAULT_N_PATHS,
    DEFAULT_SEED,
    MIN_STEPS,
    NOISE_FLOOR_FACTOR,
    STATUS_OK,
)

import numpy as np
import pandas as pd


def noise_floor(n_paths: int) -> float:
    """Monte Carlo noise floor `2 / sqrt(n)` of a KS distance between two samples of size `n`."""
    if n_paths <= 0:
        return math.inf

    return NOISE_FLOOR_FACTOR / math.sqrt(n_paths)


@dataclass(frozen=True)
class EulerConfig:
    """Euler scheme settings.

    Residual jumps larger than `jump_cut` are simulated, smaller ones are replaced by their
    compensator. Paths are simulated in chunks of `chunk_size`, each with its own child seed.
    """

    dt: float = DEFAULT_DT
    jump_cut: float = DEFAULT_JUMP_CUT
    n_paths: int = DEFAULT_N_PATHS
    seed: int = DEFAULT_SEED
    workers: int | None = 1
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise PreconditionError(f"Time step must be positive, got dt={self.dt}")
        if not 0.0 < self.jump_cut <= 1.0:
            raise PreconditionError(f"jump_cut must lie in (0, 1], got {self.jump_cut}")
        if self.n_paths < 0:
            raise PreconditionError(f"n_paths must be nonnegative, got {self.n_paths}")
        if self.chunk_size < 1:
            raise PreconditionError(f"chunk_size must be positive, got {self.chunk_size}")

    def n_steps(self, t_: float) -> int:
        """Number of equal steps covering `[0, t]`.

        Raises:
            PreconditionError: When `dt > t / 16`.

        """
        if not t_ > 0.0:
            raise PreconditionError(f"Horizon must be positive, got t={t_}")
        if self.dt > t_ / MIN_STEPS * (1.0 + 1e-12):
            raise PreconditionError(f"dt={self.dt:g} is coarser than t/{MIN_STEPS} for t={t_:g}")

        return max(MIN_STEPS, math.ceil(t_ / self.dt - 1e-9))

    def halved(self) -> EulerConfig:
        return replace(self, dt=0.5 * self.dt)

    def with_seed(self, seed: int) -> EulerConfig:
        return replace(self, seed=seed)


@dataclass(frozen=True)
class DistanceRow:
    t: float
    n_paths: int
    ks: float
    cramer: float
    variant: str


@dataclass
class ExperimentResult:
    """Distances between simulated and approximating laws over a list of times, with the fitted rate."""

    rows: list[DistanceRow]
    slope: float
    halfwidth: float
    noise_floor: float
    status: str
    required_slope: float
    seed: int = DEFAULT_SEED
    dt: float = DEFAULT_DT
    variant: str = "chi"
    notes: dict[str, t.Any] = field(default_factory=dict)

    @property
    def t_values(self) -> np.ndarray:
        return np.array([row.t for row in self.rows])

    @property
    def ks_values(self) -> np.ndarray:
        return np.array([row.ks for row in self.rows])

    @property
    def failed(self) -> bool:
        """A conclusive run whose slope misses the required rate."""
        return self.status == STATUS_OK and self.slope < self.required_slope

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": [row.t for row in self.rows],
                "n_paths": [row.n_paths for row in self.rows],
                "ks": [row.ks for row in self.rows],
                "cramer": [row.cramer for row in self.rows],
                "variant": [row.variant for row in self.rows],
                "slope": [self.slope] * len(self.rows),
            }
        )

    def metadata(self) -> dict[str, t.Any]:
        return {
            "seed": self.seed,
            "dt": self.dt,
            "variant": self.variant,
            "slope": self.slope,
            "halfwidth": self.halfwidth,
            "noise_floor": self.noise_floor,
            "required_slope": self.required_slope,
            "status": self.status,
            **self.notes,
        }


@dataclass(frozen=True)
class BiasCheck:
    """KS distance between Euler runs at `dt` and `dt / 2` with common seed."""

    dt: float
    ks: float
    noise_floor: float

    @property
    def within_noise(self) -> bool:
        return self.ks < self.noise_floor
