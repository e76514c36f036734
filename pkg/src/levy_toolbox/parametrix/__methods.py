"""Differential error kernel `Phi_t(x, y) = (L_x - d/dt) p^0_t(x, y)` of the zero-order term.

`Phi` splits into a drift part, a stable-coefficient part and the residual-jump part. Pointwise
functions invert the stable density directly; `phi_components` produces whole grids from FFT
columns, one column per end point `y`.
"""

from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.parametrix.methods")

from levy_toolbox.flows import FlowConfig, mollified_drift, solve_kappa
from levy_toolbox.model import (
    DensityResidual,
    ModelSpec,
    PointMassResidual,
    partially_compensated_drift,
    residual_moment,
)
from levy_toolbox.regression import ZeroOrderColumns, averaged_params, zero_order_column
from levy_toolbox.stable import (
    InversionSpec,
    StableParams,
    stable_density,
    stable_density_derivs,
    stable_operator_density,
)
from levy_toolbox.utils.quadrature_utils import power_law_nodes

from .classes import DensityField, Grid, PhiComponents
from .constants import JUMP_ORDER

import numpy as np

DEFAULT_FLOW = FlowConfig()


class _ZeroOrderAt:
    """`p^0_t(., y)` for one end point `y`, evaluated pointwise by inversion."""

    def __init__(self, model: ModelSpec, y: float, t_: float, cfg: FlowConfig, spec: InversionSpec) -> None:
        self.tau = model.tau(t_)
        self.kappa = float(solve_kappa(model, float(y), t_, cfg).endpoint)
        self.law: StableParams = averaged_params(model, float(y), t_, "kappa_tilde", cfg).stable_params(model.alpha)
        self.spec = spec

    def w(self, x: t.Any) -> np.ndarray:
        return (self.kappa - np.asarray(x, dtype=float)) / self.tau

    def density(self, x: t.Any) -> np.ndarray:
        return stable_density(self.law, self.w(x), self.spec) / self.tau

    def d_x(self, x: t.Any) -> np.ndarray:
        return -stable_density_derivs(self.law, self.w(x), "dw", self.spec) / self.tau**2

    def d_xx(self, x: t.Any) -> np.ndarray:
        return stable_density_derivs(self.law, self.w(x), "dww", self.spec) / self.tau**3

    def operator(self, x: t.Any, kind: t.Literal["sym", "asym"]) -> np.ndarray:
        return stable_operator_density(self.law, self.w(x), kind, self.spec)


def phi_drift(
    model: ModelSpec,
    t_: float,
    x: t.Any,
    y: float,
    cfg: FlowConfig = DEFAULT_FLOW,
    spec: InversionSpec = InversionSpec(),
) -> np.ndarray:
    """`(b_t(x) - B_t(kappa_t(y))) d/dx p^0_t(x, y)`, vectorised over `x`."""
    p0 = _ZeroOrderAt(model, y, t_, cfg, spec)
    gap = partially_compensated_drift(model, t_, x) - mollified_drift(model, t_, p0.kappa, cfg.mollifier)

    return gap * p0.d_x(x)


def _phi_alpha_from(
    model: ModelSpec, t_: float, x: t.Any, kappa: t.Any, tau: float, sym: np.ndarray, asym: np.ndarray
) -> np.ndarray:
    ## L^asym changes sign under the reflection x -> kappa - x
    d_lam = model.lam(x) - model.lam(kappa)
    d_lam_rho = model.lam_rho(x) - model.lam_rho(kappa)

    return (d_lam * sym - d_lam_rho * asym) / (tau * t_)


def phi_alpha(
    model: ModelSpec,
    t_: float,
    x: t.Any,
    y: float,
    cfg: FlowConfig = DEFAULT_FLOW,
    spec: InversionSpec = InversionSpec(),
) -> np.ndarray:
    """Coefficient-difference part `(L^(alpha), x - L^(alpha), kappa_t(y)) p^0_t(x, y)`."""
    x = np.asarray(x, dtype=float)
    p0 = _ZeroOrderAt(model, y, t_, cfg, spec)

    return _phi_alpha_from(model, t_, x, p0.kappa, p0.tau, p0.operator(x, "sym"), p0.operator(x, "asym"))


def _jump_nodes(tau: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    u, w = power_law_nodes(tau, upper, order=JUMP_ORDER)

    return np.concatenate((u, -u)), np.concatenate((w, w))


def phi_nu_parts(
    model: ModelSpec,
    t_: float,
    x: t.Any,
    y: float,
    cfg: FlowConfig = DEFAULT_FLOW,
    spec: InversionSpec = InversionSpec(),
) -> dict[str, np.ndarray]:
    """`small`, `large_plus` and `large_minus` parts of `Phi^nu_t(x, y)`, vectorised over `x`.

    Jumps with `|u| <= t^(1/alpha)` enter through the second-order Taylor term
    `p''(x) int u^2 nu(x, du) / 2`; larger jumps are integrated exactly.
    """
    x = np.asarray(x, dtype=float)
    zeros = np.zeros_like(x)
    if model.nu is None:
        return {"small": zeros, "large_plus": zeros, "large_minus": zeros}

    p0 = _ZeroOrderAt(model, y, t_, cfg, spec)
    tau = p0.tau

    small = 0.5 * p0.d_xx(x) * residual_moment(model, x, 0.0, tau, power=2)
    large_minus = -p0.density(x) * residual_moment(model, x, tau, np.inf, power=0)

    if isinstance(model.nu, PointMassResidual):
        large_plus = zeros.copy()
        for position, weight in zip(model.nu.positions(x), model.nu.weights(x)):
            far = np.abs(position) > tau
            large_plus = large_plus + np.where(far, weight * p0.density(x + position), 0.0)
    else:
        u, w = _jump_nodes(tau, np.inf)
        xx = x[..., None]
        large_plus = (model.nu.density(xx, u) * p0.density(xx + u)) @ w

    return {"small": small, "large_plus": large_plus, "large_minus": large_minus}


def phi_nu(
    model: ModelSpec,
    t_: float,
    x: t.Any,
    y: float,
    cfg: FlowConfig = DEFAULT_FLOW,
    spec: InversionSpec = InversionSpec(),
) -> np.ndarray:
    """Residual-jump part `L^(nu, x, t) p^0_t(x, y)`; zero without a residual kernel."""
    parts = phi_nu_parts(model, t_, x, y, cfg, spec)

    return parts["small"] + parts["large_plus"] + parts["large_minus"]


def _shifted_rows(values: np.ndarray, grid: Grid, shift: t.Any) -> np.ndarray:
    """`f(x_i + shift_i, y_j)` by linear interpolation along `x`; zero off the grid."""
    n = grid.n_points
    pos = (grid.points + np.asarray(shift, dtype=float) - grid.x_min) / grid.h
    inside = (pos >= 0.0) & (pos <= n - 1)

    base = np.clip(np.floor(pos).astype(int), 0, n - 2)
    frac = np.clip(pos - base, 0.0, 1.0)[:, None]
    rows = (1.0 - frac) * values[base] + frac * values[base + 1]

    return np.where(inside[:, None], rows, 0.0)


def _large_plus_grid(model: ModelSpec, grid: Grid, tau: float, p0: np.ndarray) -> np.ndarray:
    x = grid.points
    out = np.zeros_like(p0)

    if isinstance(model.nu, PointMassResidual):
        for position, weight in zip(model.nu.positions(x), model.nu.weights(x)):
            far = np.abs(position) > tau
            out += np.where(far, weight, 0.0)[:, None] * _shifted_rows(p0, grid, position)
        return out

    width = grid.x_max - grid.x_min
    if tau >= width:
        return out

    u, w = _jump_nodes(tau, width)
    for u_k, w_k in zip(u, w):
        out += (w_k * model.nu.density(x, u_k))[:, None] * _shifted_rows(p0, grid, u_k)

    return out


def _components_from_columns(
    model: ModelSpec, t_: float, grid: Grid, columns: ZeroOrderColumns, cfg: FlowConfig
) -> PhiComponents:
    x = grid.points
    tau = columns.scale
    kappa = columns.kappa

    ## columns are indexed (y, x); fields are (x, y)
    p0, d_x, d_xx = columns.density.T, columns.d_x.T, columns.d_xx.T

    gap = partially_compensated_drift(model, t_, x)[:, None] - mollified_drift(model, t_, kappa, cfg.mollifier)[None, :]
    drift = gap * d_x

    alpha_part = _phi_alpha_from(
        model, t_, x[:, None], kappa[None, :], tau, columns.sym.T, columns.asym.T
    )

    if model.nu is None:
        nu_part = np.zeros_like(p0)
        large_plus = np.zeros_like(p0)
    else:
        small = 0.5 * d_xx * residual_moment(model, x, 0.0, tau, power=2)[:, None]
        large_minus = -p0 * residual_moment(model, x, tau, np.inf, power=0)[:, None]
        large_plus = _large_plus_grid(model, grid, tau, p0)
        nu_part = small + large_plus + large_minus

    q = t_ ** (model.beta_activity / model.alpha) * np.abs(large_plus)

    def as_field(values: np.ndarray, name: str) -> DensityField:
        return DensityField(grid=grid, t=t_, values=values, tail_exponent=model.alpha + 1.0, name=name)

    return PhiComponents(
        drift=as_field(drift, "phi_drift"),
        alpha=as_field(alpha_part, "phi_alpha"),
        nu=as_field(nu_part, "phi_nu"),
        q=as_field(q, "q"),
    )


def zero_order_field(
    model: ModelSpec, t_: float, grid: Grid, cfg: FlowConfig = DEFAULT_FLOW
) -> tuple[DensityField, ZeroOrderColumns]:
    """`p^0_t` on the grid, together with the columns it was built from."""
    columns = zero_order_column(model, grid.points, t_, grid.x_min, grid.h, grid.n_points, cfg)
    field = DensityField(grid=grid, t=t_, values=columns.density.T, tail_exponent=model.alpha + 1.0, name="p0")

    return field, columns


def phi_components(
    model: ModelSpec,
    t_: float,
    grid: Grid,
    cfg: FlowConfig = DEFAULT_FLOW,
    columns: ZeroOrderColumns | None = None,
) -> PhiComponents:
    """The three parts of `Phi_t` and `Q_t` on the grid."""
    if columns is None:
        _, columns = zero_order_field(model, t_, grid, cfg)

    return _components_from_columns(model, t_, grid, columns, cfg)


def phi_total(
    model: ModelSpec,
    t_: float,
    grid: Grid,
    cfg: FlowConfig = DEFAULT_FLOW,
    columns: ZeroOrderColumns | None = None,
) -> DensityField:
    """`Phi_t` on the grid; diagnostics hold `sup_x int |.| dy` of the total and of every part."""
    parts = phi_components(model, t_, grid, cfg, columns)
    total = parts.total
    rows = grid.interior()

    total.diagnostics = {
        "phi_l1": total.l1_norm(rows),
        "drift_l1": parts.drift.l1_norm(rows),
        "alpha_l1": parts.alpha.l1_norm(rows),
        "nu_l1": parts.nu.l1_norm(rows),
        "q_l1": parts.q.l1_norm(rows),
    }
    log.debug(f"Phi at t={t_:g}: sup_x int |Phi| dy = {total.diagnostics['phi_l1']:.4g}")

    return total


def invert_condition_constant(model: ModelSpec, t_: float, grid: Grid) -> float:
    """`sup_w t^(-1/alpha) int |nu|(x; {|u| > t^(1/alpha), |x + u - w| <= t^(1/alpha)}) dx` on the grid.

    Zero without a residual kernel; the `x`-integral runs over the grid only.
    """
    nu = model.nu
    if nu is None:
        return 0.0

    tau = model.tau(t_)
    x = grid.points
    w_points = grid.points
    mass = np.zeros((x.size, w_points.size))

    if isinstance(nu, PointMassResidual):
        for position, weight in zip(nu.positions(x), nu.weights(x)):
            hit = np.abs((x + position)[:, None] - w_points[None, :]) <= tau
            mass += np.where((np.abs(position) > tau)[:, None] & hit, np.abs(weight)[:, None], 0.0)
    elif isinstance(nu, DensityResidual):
        width = grid.x_max - grid.x_min + tau
        u, w = power_law_nodes(tau, width, order=JUMP_ORDER)
        u_all = np.concatenate((-u[::-1], u))
        w_all = np.concatenate((w[::-1], w))
        for i, xi in enumerate(x):
            ## cumulative |nu|(xi; .) over the jump nodes, read off between the window edges
            cumulative = np.cumsum(np.abs(nu.density(xi, u_all)) * w_all)
            upper = np.interp(w_points - xi + tau, u_all, cumulative, left=0.0, right=cumulative[-1])
            lower = np.interp(w_points - xi - tau, u_all, cumulative, left=0.0, right=cumulative[-1])
            mass[i] = upper - lower

    return float(np.max(grid.weights @ mass) / tau)
