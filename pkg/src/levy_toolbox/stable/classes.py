from __future__ import annotations

from dataclasses import dataclass, replace
import logging
import typing as t

log = logging.getLogger("levy_toolbox.stable.classes")

from levy_toolbox.exc import PreconditionError

from .constants import INVERSION_MODES

import numpy as np
from scipy import special

## Multiplier applied on the Fourier side before inversion
DensityKind = t.Literal["density", "dw", "dww", "dlambda", "drho", "sym", "asym"]
InversionMode = t.Literal["panels", "fft", "adaptive"]


def stable_constant(alpha: float) -> float:
    """`c_alpha` with `int (1 - cos(u xi)) |u|^(-alpha-1) du = c_alpha |xi|^alpha`."""
    return float(np.pi / (special.gamma(1.0 + alpha) * np.sin(0.5 * np.pi * alpha)))


@dataclass(frozen=True)
class StableParams:
    """One stable law with Levy density `lam (1 + rho sgn u) |u|^(-alpha-1)` and shift `upsilon`."""

    alpha: float
    lam: float
    rho: float = 0.0
    upsilon: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 2.0:
            raise PreconditionError(f"alpha={self.alpha} outside (0, 2)")
        if not self.lam > 0.0:
            raise PreconditionError(f"lambda={self.lam} must be positive")
        if abs(self.rho) > 1.0:
            raise PreconditionError(f"rho={self.rho} outside [-1, 1]")

    @property
    def c_alpha(self) -> float:
        return stable_constant(self.alpha)

    @property
    def scale_rate(self) -> float:
        """`c_1` in `Re Psi(xi) = -c_1 |xi|^alpha`."""
        return self.lam * self.c_alpha

    def shifted(self, upsilon: float) -> StableParams:
        return replace(self, upsilon=float(upsilon))


@dataclass(frozen=True)
class InversionSpec:
    """How a density is recovered from its characteristic function.

    `xi_max=None` derives the truncation from the law; `n_nodes` sets the transform length
    in `fft` mode and the subdivision limit in `adaptive` mode.
    """

    xi_max: float | None = None
    n_nodes: int | None = None
    mode: InversionMode = "panels"

    def __post_init__(self) -> None:
        if self.mode not in INVERSION_MODES:
            raise PreconditionError(f"Unknown inversion mode '{self.mode}', expected one of {INVERSION_MODES}")
        if self.xi_max is not None and not self.xi_max > 0.0:
            raise PreconditionError(f"xi_max={self.xi_max} must be positive")
        if self.n_nodes is not None and self.n_nodes < 1:
            raise PreconditionError(f"n_nodes={self.n_nodes} must be positive")
