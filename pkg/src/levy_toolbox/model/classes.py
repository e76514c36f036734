from __future__ import annotations

from dataclasses import dataclass, field
import logging
import typing as t

log = logging.getLogger("levy_toolbox.model.classes")

from levy_toolbox.exc import ModelSpecError

from .constants import VALIDATION_N_POINTS, VALIDATION_X_MAX, VALIDATION_X_MIN

import numpy as np

## A coefficient of the model: vectorised map from states to values
CoefficientFn = t.Callable[..., t.Any]


def evaluate(fn: CoefficientFn, x: t.Any) -> np.ndarray:
    """Evaluate a coefficient on `x`, broadcasting constant results to the shape of `x`."""
    x_arr = np.asarray(x, dtype=float)
    value = np.asarray(fn(x_arr), dtype=float)

    return np.broadcast_to(value, x_arr.shape).astype(float)


@dataclass(frozen=True)
class DensityResidual:
    """Residual kernel with a density `q_nu(x, u)` in the jump size `u`."""

    q_nu: CoefficientFn
    beta: float
    gamma: float

    def density(self, x: t.Any, u: t.Any) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        u_arr = np.asarray(u, dtype=float)
        value = np.asarray(self.q_nu(x_arr, u_arr), dtype=float)

        return np.broadcast_to(value, np.broadcast_shapes(x_arr.shape, u_arr.shape)).astype(float)


@dataclass(frozen=True)
class Atom:
    position_fn: CoefficientFn
    weight_fn: CoefficientFn


@dataclass(frozen=True)
class PointMassResidual:
    """Residual kernel `sum_i w_i(x) delta_{u_i(x)}(du)`."""

    atoms: tuple[Atom, ...]

    def positions(self, x: t.Any) -> list[np.ndarray]:
        return [evaluate(atom.position_fn, x) for atom in self.atoms]

    def weights(self, x: t.Any) -> list[np.ndarray]:
        return [evaluate(atom.weight_fn, x) for atom in self.atoms]


ResidualKernel = DensityResidual | PointMassResidual | None


@dataclass(frozen=True)
class ModelSpec:
    """A locally alpha-stable Levy-type model.

    Drift `b(x)`, stable part with Levy density `lambda(x)(1 + rho(x) sgn u)|u|^(-alpha-1)`,
    residual kernel `nu(x, du)` and the regularity indices used by the error bounds.
    """

    alpha: float
    lambda_fn: CoefficientFn
    rho_fn: CoefficientFn
    b_fn: CoefficientFn
    nu: ResidualKernel = None
    eta: float = 1.0
    zeta: float = 0.5
    beta_activity: float = 0.5
    lambda_min: float = 1.0
    lambda_max: float = 1.0
    horizon_T: float = 1.0
    drift_bounded: bool = False
    name: str = "model"

    def __post_init__(self) -> None:
        problems: list[str] = []

        if not 0.0 < self.alpha < 2.0:
            problems.append(f"alpha={self.alpha} outside (0, 2)")
        if not 0.0 <= self.eta <= 1.0:
            problems.append(f"eta={self.eta} outside [0, 1]")
        if self.alpha + self.eta <= 1.0:
            problems.append(f"balance condition alpha + eta > 1 fails ({self.alpha} + {self.eta})")
        if not 0.0 < self.zeta < self.alpha:
            problems.append(f"zeta={self.zeta} outside (0, alpha)")
        if not 0.0 < self.beta_activity < self.alpha:
            problems.append(f"beta_activity={self.beta_activity} outside (0, alpha)")
        if not 0.0 < self.lambda_min <= self.lambda_max:
            problems.append(f"need 0 < lambda_min <= lambda_max, got {self.lambda_min}, {self.lambda_max}")
        if self.horizon_T <= 0.0:
            problems.append(f"horizon_T={self.horizon_T} must be positive")
        if isinstance(self.nu, DensityResidual) and not self.nu.gamma > 0.0:
            problems.append(f"residual tail index gamma={self.nu.gamma} must be positive")

        if problems:
            msg = ModelSpecError(f"Invalid model '{self.name}': " + "; ".join(problems))
            log.error(msg)

            raise msg

    def lam(self, x: t.Any) -> np.ndarray:
        return evaluate(self.lambda_fn, x)

    def rho(self, x: t.Any) -> np.ndarray:
        return evaluate(self.rho_fn, x)

    def b(self, x: t.Any) -> np.ndarray:
        return evaluate(self.b_fn, x)

    def lam_rho(self, x: t.Any) -> np.ndarray:
        return self.lam(x) * self.rho(x)

    def upsilon(self, x: t.Any) -> np.ndarray:
        """`upsilon(x) = 2 lambda(x) rho(x)`."""
        return 2.0 * self.lam_rho(x)

    def tau(self, t_: float) -> float:
        """Spatial scale `t^(1/alpha)`."""
        return float(t_) ** (1.0 / self.alpha)


@dataclass(frozen=True)
class DeltaExponents:
    delta_eta: float
    delta_zeta: float
    delta_beta: float
    delta: float
    delta_nu: float | None = None

    @property
    def delta_infty(self) -> float | None:
        if self.delta_nu is None:
            return None

        return min(self.delta, self.delta_nu)


@dataclass(frozen=True)
class SampleGrid:
    x_min: float = VALIDATION_X_MIN
    x_max: float = VALIDATION_X_MAX
    n_points: int = VALIDATION_N_POINTS

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    measured: float
    limit: float | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    model_name: str
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> list[ValidationCheck]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> ValidationCheck:
        for check in self.checks:
            if check.name == name:
                return check

        raise KeyError(name)

    def as_dict(self) -> dict[str, t.Any]:
        entries: dict[str, t.Any] = {"model": self.model_name, "all_passed": self.passed}
        for check in self.checks:
            entries[f"{check.name}.passed"] = check.passed
            entries[f"{check.name}.measured"] = check.measured
            if check.limit is not None:
                entries[f"{check.name}.limit"] = check.limit
            if check.detail:
                entries[f"{check.name}.detail"] = check.detail

        return entries
