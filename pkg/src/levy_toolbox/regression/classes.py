from __future__ import annotations

from dataclasses import dataclass
import logging
import re
import typing as t

log = logging.getLogger("levy_toolbox.regression.classes")

from levy_toolbox.exc import PreconditionError
from levy_toolbox.stable import InversionSpec, StableParams, sample_stable, stable_cdf, stable_density

from .constants import DEFAULT_PICARD_ORDER, FLOW_VARIANTS, REGRESSOR_VARIANTS

import numpy as np

FlowVariant = t.Literal["chi", "kappa_tilde", "chi_t_overline"]
RegressorVariant = t.Literal["chi", "chi_t_overline", "picard", "frozen", "frozen_overline"]

_PICARD_PATTERN = re.compile(r"^picard\((\d+)\)$")


@dataclass(frozen=True)
class AveragedParams:
    """Model coefficients averaged along a flow.

    Scalar fields for a scalar starting point, arrays of the starting points' shape otherwise.
    """

    lambda_t: t.Any
    rho_t: t.Any
    upsilon_t: t.Any
    variant: FlowVariant = "chi"

    def __post_init__(self) -> None:
        if self.variant not in FLOW_VARIANTS:
            raise PreconditionError(f"Unknown flow variant '{self.variant}', expected one of {FLOW_VARIANTS}")

    def stable_params(self, alpha: float) -> StableParams:
        if np.ndim(self.lambda_t) != 0:
            raise PreconditionError("Averages over several starting points do not form a single law")

        return StableParams(
            alpha=alpha, lam=float(self.lambda_t), rho=float(self.rho_t), upsilon=float(self.upsilon_t)
        )


@dataclass(frozen=True)
class RegressorChoice:
    """A regressor variant together with the Picard order it uses (ignored by the other variants)."""

    kind: RegressorVariant = "chi"
    order: int = DEFAULT_PICARD_ORDER

    def __post_init__(self) -> None:
        if self.kind not in REGRESSOR_VARIANTS:
            raise PreconditionError(
                f"Unknown regressor variant '{self.kind}', expected one of {REGRESSOR_VARIANTS}"
            )
        if self.order < 0:
            raise PreconditionError(f"Picard order must be nonnegative, got {self.order}")

    @classmethod
    def parse(cls, value: str | RegressorChoice) -> RegressorChoice:
        """Accept `chi`, `frozen`, ... or `picard(k)`."""
        if isinstance(value, RegressorChoice):
            return value

        text = value.strip()
        match = _PICARD_PATTERN.match(text)
        if match:
            return cls(kind="picard", order=int(match.group(1)))

        return cls(kind=t.cast(RegressorVariant, text))

    def __str__(self) -> str:
        if self.kind == "picard":
            return f"picard({self.order})"

        return self.kind


@dataclass(frozen=True)
class RegressionLaw:
    """Law of `X~ = f_t(x) + t^(1/alpha) U` with a stable innovation `U`."""

    regressor: float
    scale: float
    innovation: StableParams
    variant: str = "chi"

    def density(self, y: t.Any, spec: InversionSpec = InversionSpec()) -> np.ndarray:
        w = (np.asarray(y, dtype=float) - self.regressor) / self.scale

        return stable_density(self.innovation, w, spec) / self.scale

    def cdf(self, y: t.Any, spec: InversionSpec = InversionSpec()) -> np.ndarray:
        w = (np.asarray(y, dtype=float) - self.regressor) / self.scale

        return stable_cdf(self.innovation, w, spec)

    def sample(self, count: int, seed: int) -> np.ndarray:
        return self.regressor + self.scale * sample_stable(self.innovation, count, seed)


@dataclass(frozen=True)
class ZeroOrderColumns:
    """`p^0_t(x, y)` and its `x`-derivatives for fixed `y` columns on a uniform `x` grid.

    Arrays are indexed `(column, x)`. `sym` and `asym` hold `L^sym g~` and `L^asym g~` at
    `w = (kappa_t(y) - x) / t^(1/alpha)`, without the `1/t^(1/alpha)` density factor.
    """

    y: np.ndarray
    kappa: np.ndarray
    params: AveragedParams
    scale: float
    density: np.ndarray
    d_x: np.ndarray
    d_xx: np.ndarray
    sym: np.ndarray
    asym: np.ndarray
