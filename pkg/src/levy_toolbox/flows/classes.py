from __future__ import annotations

from dataclasses import dataclass, field
import logging
import typing as t

log = logging.getLogger("levy_toolbox.flows.classes")

from levy_toolbox.exc import PreconditionError
from levy_toolbox.utils.fit_utils import FittedConstant

from .constants import (
    BANDWIDTH_FACTOR,
    DEFAULT_STEPS,
    ENDPOINT_RTOL,
    GRADING_ORDER,
    HERMITE_NODES,
    MAX_DOUBLINGS,
)

import numpy as np
import pandas as pd
from scipy import interpolate


@dataclass(frozen=True)
class MollifierSpec:
    """Gaussian mollifier with standard deviation `bandwidth * t^(1/alpha)`."""

    n_nodes: int = HERMITE_NODES
    bandwidth: float = BANDWIDTH_FACTOR

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise PreconditionError(f"Need at least one Gauss-Hermite node, got {self.n_nodes}")
        if not self.bandwidth > 0.0:
            raise PreconditionError(f"Bandwidth must be positive, got {self.bandwidth}")

    def sigma(self, t_: float, alpha: float) -> float:
        return self.bandwidth * float(t_) ** (1.0 / alpha)


@dataclass(frozen=True)
class FlowConfig:
    """Time stepping of the flows.

    `grading=None` picks `GRADING_ORDER * max(1, alpha)`, smooth enough in the mesh variable
    for the fourth-order scheme near the singular end.
    """

    n_steps: int = DEFAULT_STEPS
    grading: float | None = None
    rtol: float = ENDPOINT_RTOL
    max_doublings: int = MAX_DOUBLINGS
    mollifier: MollifierSpec = MollifierSpec()

    def __post_init__(self) -> None:
        if self.n_steps < 2 or self.n_steps % 2:
            raise PreconditionError(f"n_steps must be even and at least 2, got {self.n_steps}")
        if self.grading is not None and self.grading < 1.0:
            raise PreconditionError(f"Mesh grading must be at least 1, got {self.grading}")

    def grading_for(self, alpha: float) -> float:
        if self.grading is not None:
            return float(self.grading)

        return GRADING_ORDER * max(1.0, alpha)


@dataclass(frozen=True)
class Trajectory:
    """Flow states on a time mesh over `[0, t]`.

    `states` has one row per time; a vector of initial points gives one column per point.
    `weights` integrate functions of time along the mesh: `int_0^t f(s) ds ~ weights @ f(times)`.
    """

    times: np.ndarray
    states: np.ndarray
    weights: np.ndarray

    @property
    def t(self) -> float:
        return float(self.times[-1])

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]

    def at(self, s: t.Any) -> np.ndarray:
        """Piecewise cubic interpolation of the states at time(s) `s`."""
        return interpolate.CubicSpline(self.times, self.states, axis=0)(s)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """`int_0^t f(s) ds` for `values = f(times)` (leading axis is time)."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def to_frame(self) -> pd.DataFrame:
        if self.states.ndim != 1:
            raise PreconditionError("Only scalar trajectories export to two-column tables")

        return pd.DataFrame({"s": self.times, "value": self.states})


@dataclass
class FlowPropertyReport:
    """Fitted constants of the randomised flow inequalities.

    `sandwich`: `|log(|kappa_{t-s}(y) - chi^t_s(x)| / |kappa_t(y) - x|)| <= C t^delta`.
    `proximity`: `|chi^t_s(x) - chi_s(x)| <= C t^(1/alpha)`.
    `cone`: `C^-1 |x| <= |chi_t(x)| <= C |x|` on the sampled range of `|x|`.
    """

    model_name: str
    delta: float
    constants: dict[str, FittedConstant] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.stable for c in self.constants.values())

    def as_dict(self) -> dict[str, t.Any]:
        entries: dict[str, t.Any] = {"delta": self.delta}
        for name, constant in self.constants.items():
            entries[f"{name}.C"] = constant.value
            entries[f"{name}.C_doubled"] = constant.value_doubled
            entries[f"{name}.stable"] = constant.stable
            entries[f"{name}.n"] = constant.n_samples
        entries["all_stable"] = self.passed

        return entries
