from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import typing as t

log = logging.getLogger("levy_toolbox.parametrix.classes")

from levy_toolbox.exc import PreconditionError, QuadratureError
from levy_toolbox.flows import FlowConfig

from .constants import (
    DEFAULT_ORDER,
    DEFAULT_TIME_NODES,
    GRID_PAD,
    GRID_SCALE_WIDTH,
    GROWTH_TOLERANCE,
    INTERIOR_FRACTION,
    MIN_GRID_POINTS,
)

import numpy as np
import pandas as pd
from scipy import integrate, interpolate


@dataclass(frozen=True)
class Grid:
    """Uniform grid shared by the start point `x` and the end point `y`."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if self.n_points < MIN_GRID_POINTS:
            raise PreconditionError(f"Need at least {MIN_GRID_POINTS} grid points, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise PreconditionError(f"Empty grid [{self.x_min}, {self.x_max}]")

    @classmethod
    def centred(cls, centre: float, t_: float, alpha: float, n_points: int) -> Grid:
        """Grid over `centre +- (40 t^(1/alpha) + 10)`."""
        half = GRID_SCALE_WIDTH * t_ ** (1.0 / alpha) + GRID_PAD

        return cls(x_min=centre - half, x_max=centre + half, n_points=n_points)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def centre(self) -> float:
        return 0.5 * (self.x_min + self.x_max)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(self.n_points, self.h)
        w[[0, -1]] *= 0.5

        return w

    def interior(self, fraction: float = INTERIOR_FRACTION) -> np.ndarray:
        """Mask of the points within `fraction` of the half-width around the centre."""
        half = 0.5 * (self.x_max - self.x_min)

        return np.abs(self.points - self.centre) <= fraction * half


@dataclass
class DensityField:
    """Kernel values `values[i, j] = f_t(x_i, y_j)` on a grid.

    Off the grid in `y` the field decays like `|y - x|^(-tail_exponent)`; `x` is clamped.
    """

    grid: Grid
    t: float
    values: np.ndarray
    tail_exponent: float = 2.0
    name: str = "field"
    diagnostics: dict[str, t.Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise PreconditionError(f"Field '{self.name}' has shape {self.values.shape}, grid needs {(n, n)}")
        if not np.all(np.isfinite(self.values)):
            msg = QuadratureError(f"Field '{self.name}' at t={self.t:g} has non-finite values")
            log.error(msg)

            raise msg

    def __call__(self, x: t.Any, y: t.Any) -> np.ndarray:
        x_b, y_b = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        lo, hi = self.grid.x_min, self.grid.x_max
        xc, yc = np.clip(x_b, lo, hi), np.clip(y_b, lo, hi)

        points = self.grid.points
        inner = interpolate.RegularGridInterpolator((points, points), self.values, method="linear")
        values = inner(np.stack([xc.ravel(), yc.ravel()], axis=-1)).reshape(x_b.shape)

        ## power-law continuation beyond the y edges
        decay = ((1.0 + np.abs(yc - xc)) / (1.0 + np.abs(y_b - xc))) ** self.tail_exponent

        return values * decay

    def with_values(self, values: np.ndarray, name: str | None = None) -> DensityField:
        return replace(self, values=values, name=name or self.name, diagnostics={})

    def __add__(self, other: DensityField) -> DensityField:
        return self.with_values(self.values + other.values)

    def __sub__(self, other: DensityField) -> DensityField:
        return self.with_values(self.values - other.values)

    def row_integrals(self) -> np.ndarray:
        """`int f_t(x_i, y) dy` for every row."""
        return integrate.trapezoid(self.values, dx=self.grid.h, axis=1)

    def l1_norm(self, rows: np.ndarray | None = None) -> float:
        """`sup_x int |f_t(x, y)| dy`, optionally over a subset of rows."""
        norms = integrate.trapezoid(np.abs(self.values), dx=self.grid.h, axis=1)
        if rows is not None:
            norms = norms[rows]

        return float(np.max(norms))

    def to_frame(self) -> pd.DataFrame:
        xx, yy = np.meshgrid(self.grid.points, self.grid.points, indexing="ij")

        return pd.DataFrame(
            {"t": np.full(xx.size, self.t), "x": xx.ravel(), "y": yy.ravel(), "value": self.values.ravel()}
        )


@dataclass
class FieldFamily:
    """Fields at the times `k t / m`, `k = 1..m`.

    `singularity` is the exponent `d` of the small-time behaviour `s^(-1 + d)` of the fields;
    `1` means bounded.
    """

    t: float
    fields: list[DensityField]
    singularity: float = 1.0

    def __post_init__(self) -> None:
        if not self.fields:
            raise PreconditionError("A field family needs at least one time")
        if not self.singularity > 0.0:
            raise PreconditionError(f"Singularity exponent must be positive, got {self.singularity}")

    @property
    def m(self) -> int:
        return len(self.fields)

    @property
    def step(self) -> float:
        return self.t / self.m

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(1, self.m + 1)

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid

    @property
    def final(self) -> DensityField:
        return self.fields[-1]

    def __getitem__(self, k: int) -> DensityField:
        """Field at time `k t / m` (1-based)."""
        if not 1 <= k <= self.m:
            raise IndexError(f"Time index {k} outside 1..{self.m}")

        return self.fields[k - 1]

    def __add__(self, other: FieldFamily) -> FieldFamily:
        if other.m != self.m:
            raise PreconditionError(f"Cannot add families with {self.m} and {other.m} times")

        return FieldFamily(
            t=self.t,
            fields=[a + b for a, b in zip(self.fields, other.fields)],
            singularity=min(self.singularity, other.singularity),
        )


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and time quadrature of the resolvent series `Psi = sum_k Phi^(*k)`."""

    K: int = DEFAULT_ORDER
    n_time_nodes: int = DEFAULT_TIME_NODES
    tail_bound_report: bool = True
    growth_tolerance: float = GROWTH_TOLERANCE
    fail_on_divergence: bool = False
    flow: FlowConfig = FlowConfig()

    def __post_init__(self) -> None:
        if self.K < 1:
            raise PreconditionError(f"Series order K must be at least 1, got {self.K}")
        if self.n_time_nodes < 1:
            raise PreconditionError(f"Need at least one time node, got {self.n_time_nodes}")


@dataclass
class PhiComponents:
    """`Phi = Phi^drift + Phi^(alpha) + Phi^nu` on a grid, with `Q_t = t^(beta/alpha) |Phi^(nu,large,+)|`."""

    drift: DensityField
    alpha: DensityField
    nu: DensityField
    q: DensityField

    @property
    def total(self) -> DensityField:
        return self.drift.with_values(self.drift.values + self.alpha.values + self.nu.values, name="phi")
