from __future__ import annotations

from dataclasses import dataclass, field
import logging
import typing as t

log = logging.getLogger("levy_toolbox.kernels.classes")

from levy_toolbox.exc import PreconditionError
from levy_toolbox.utils.fit_utils import FittedConstant


@dataclass(frozen=True)
class KernelParams:
    """Indices `(alpha, beta, gamma)` and time `t` of the kernel `G_t^(alpha, beta, gamma)`."""

    alpha: float
    beta: float
    gamma: float
    t: float

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) <= 0.0:
            raise PreconditionError(
                f"Kernel indices must be positive, got ({self.alpha}, {self.beta}, {self.gamma})"
            )
        if not self.t > 0.0:
            raise PreconditionError(f"Kernel time t={self.t} must be positive")

    @property
    def tau(self) -> float:
        return self.t ** (1.0 / self.alpha)

    def at(self, t_: float) -> KernelParams:
        return KernelParams(self.alpha, self.beta, self.gamma, t_)


@dataclass(frozen=True)
class ResidualBoundParams:
    beta_prime: float
    gamma_prime: float
    delta_prime: float


@dataclass
class KernelPropertyReport:
    alpha: float
    beta: float
    gamma: float
    constants: dict[str, FittedConstant] = field(default_factory=dict)
    integral_bounds: dict[float, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.stable for c in self.constants.values())

    def as_dict(self) -> dict[str, t.Any]:
        entries: dict[str, t.Any] = {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}
        for name, constant in self.constants.items():
            entries[f"{name}.C"] = constant.value
            entries[f"{name}.C_doubled"] = constant.value_doubled
            entries[f"{name}.stable"] = constant.stable
            entries[f"{name}.seed"] = constant.seed
            entries[f"{name}.n"] = constant.n_samples
        for t_, value in self.integral_bounds.items():
            entries[f"bint.t={t_:g}"] = value
        entries["all_stable"] = self.passed

        return entries
