"""Conditionally stable approximation of the transition density.

The regressor is the endpoint of a deterministic flow driven by the mollified drift, and the
innovation is a stable law whose parameters are the model coefficients averaged along that
flow. The zero-order parametrix term uses the same construction backwards in time, along
`kappa`, from the end point `y`.
"""

from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.regression.methods")

from levy_toolbox.exc import PreconditionError
from levy_toolbox.flows import (
    FlowConfig,
    Trajectory,
    picard_trajectory,
    solve_chi,
    solve_chi_overline,
    solve_kappa,
)
from levy_toolbox.model import ModelSpec, stable_truncation_integral
from levy_toolbox.stable import (
    InversionSpec,
    StableParams,
    asymmetric_exponent,
    stable_density,
    symmetric_exponent,
    transform_grid_columns,
)

from .classes import (
    AveragedParams,
    FlowVariant,
    RegressionLaw,
    RegressorChoice,
    RegressorVariant,
    ZeroOrderColumns,
)
from .constants import FLOW_VARIANTS, SLICE_PAD, SLICE_POINTS, SLICE_SCALE_WIDTH

import numpy as np
import pandas as pd

DEFAULT_CONFIG = FlowConfig()


def weight_W(alpha: float, t_: float, s: t.Any) -> np.ndarray:
    """`W_alpha(t; s) = t^(-1/alpha) int_{s^(1/alpha)}^{t^(1/alpha)} r^(-alpha) dr`.

    By homogeneity this equals `I((s/t)^(1/alpha)) / t` with `I(c) = int_c^1 r^(-alpha) dr`, which
    keeps the logarithmic form at `alpha = 1` and the `expm1` form near it. `int_0^t W ds = 1`.

    Params:
        alpha (float): Stability index.
        t_ (float): Total time, positive.
        s (array-like): Time(s) in `[0, t]`.

    Returns:
        (np.ndarray): The weight, infinite at `s = 0` when `alpha >= 1`.

    Raises:
        PreconditionError: When some `s` lies outside `[0, t]`.

    """
    s = np.asarray(s, dtype=float)
    if not t_ > 0.0:
        raise PreconditionError(f"Total time must be positive, got {t_}")
    if np.any(s < 0.0) or np.any(s > t_):
        msg = PreconditionError(f"W_alpha(t; s) needs 0 <= s <= t = {t_}, got s in [{s.min()}, {s.max()}]")
        log.error(msg)

        raise msg

    return stable_truncation_integral(alpha, (s / t_) ** (1.0 / alpha)) / t_


def _averages(model: ModelSpec, traj: Trajectory, with_upsilon: bool) -> tuple[t.Any, t.Any, t.Any]:
    states = traj.states
    total = traj.t

    lam_int = traj.integrate(model.lam(states))
    lam_rho_int = traj.integrate(model.lam_rho(states))
    lam_t = lam_int / total
    rho_t = np.clip(lam_rho_int / lam_int, -1.0, 1.0)

    if not with_upsilon:
        return _squeeze(lam_t), _squeeze(rho_t), _squeeze(np.zeros_like(lam_t))

    ## W is singular at s = 0 when alpha >= 1; graded meshes put zero weight there
    used = traj.weights != 0.0
    if model.alpha >= 1.0 and traj.times[used][0] == 0.0:
        msg = PreconditionError(
            f"W_alpha is not integrable by an ungraded mesh at s = 0 for alpha={model.alpha}; use a grading above 1"
        )
        log.error(msg)

        raise msg

    w_values = weight_W(model.alpha, total, traj.times[used])
    w_values = w_values.reshape(w_values.shape + (1,) * (states.ndim - 1))
    upsilon_t = np.tensordot(traj.weights[used], model.upsilon(states[used]) * w_values, axes=(0, 0))

    return _squeeze(lam_t), _squeeze(rho_t), _squeeze(upsilon_t)


def _squeeze(value: t.Any) -> t.Any:
    value = np.asarray(value, dtype=float)

    return float(value) if value.ndim == 0 else value


def _flow_for(model: ModelSpec, x: t.Any, t_: float, variant: FlowVariant, cfg: FlowConfig) -> Trajectory:
    match variant:
        case "chi":
            return solve_chi(model, x, t_, cfg)
        case "kappa_tilde":
            return solve_kappa(model, x, t_, cfg)
        case "chi_t_overline":
            return solve_chi_overline(model, x, t_, cfg)

    raise PreconditionError(f"Unknown flow variant '{variant}', expected one of {FLOW_VARIANTS}")


def averaged_params(
    model: ModelSpec,
    x: t.Any,
    t_: float,
    flow_variant: FlowVariant = "chi",
    cfg: FlowConfig = DEFAULT_CONFIG,
) -> AveragedParams:
    """Average `lambda`, `lambda rho` and `upsilon` along a flow started at `x`.

    `lambda_t = (1/t) int lambda(flow_s) ds`, `rho_t = int lambda rho(flow_s) ds / (t lambda_t)` and
    `upsilon_t = int upsilon(flow_s) W_alpha(t; s) ds`. The overline variant has no shift.

    Params:
        model (ModelSpec): The model.
        x (array-like): Starting point(s) of the flow.
        t_ (float): Horizon.
        flow_variant (str): `chi`, `kappa_tilde` or `chi_t_overline`.
        cfg (FlowConfig): Flow integration settings.

    Returns:
        (AveragedParams): The averages, scalar for scalar `x`.

    """
    traj = _flow_for(model, x, t_, flow_variant, cfg)
    lam_t, rho_t, upsilon_t = _averages(model, traj, with_upsilon=flow_variant != "chi_t_overline")

    return AveragedParams(lambda_t=lam_t, rho_t=rho_t, upsilon_t=upsilon_t, variant=flow_variant)


def picard_balance(model: ModelSpec, order: int) -> float:
    """`1 + eta + ... + eta^order`, which must exceed `1/alpha` for the Picard regressor."""
    return float(sum(model.eta**j for j in range(order + 1)))


def _require_picard_balance(model: ModelSpec, order: int) -> None:
    balance = picard_balance(model, order)
    if balance <= 1.0 / model.alpha:
        msg = PreconditionError(
            f"Picard regressor of order {order} needs 1 + eta + ... + eta^{order} > 1/alpha, "
            f"got {balance:.4g} <= {1.0 / model.alpha:.4g} (eta={model.eta}, alpha={model.alpha})"
        )
        log.error(msg)

        raise msg


def _require_bounded_drift(model: ModelSpec, variant: str) -> None:
    if not model.drift_bounded:
        msg = PreconditionError(
            f"Variant '{variant}' freezes the coefficients at x and needs a bounded compensated drift; "
            f"model '{model.name}' does not declare drift_bounded"
        )
        log.error(msg)

        raise msg


def regression_law(
    model: ModelSpec,
    x: float,
    t_: float,
    variant: RegressorVariant | str | RegressorChoice = "chi",
    cfg: FlowConfig = DEFAULT_CONFIG,
) -> RegressionLaw:
    """Regressor, scale and innovation law of the approximation `f_t(x) + t^(1/alpha) U`.

    Variants:
        - `chi`: regressor `chi_t(x)`, innovation from the chi-averaged `(lambda, rho, upsilon)`.
        - `chi_t_overline`: regressor `chi-bar_t(x)`, overline averages with shift 0.
        - `picard(k)`: regressor `chi^(k)_t(x)`, averages along the Picard iterate.
        - `frozen`: regressor `chi_t(x)`, innovation `(lambda(x), rho(x), upsilon(x))`.
        - `frozen_overline`: regressor `chi-bar_t(x)`, innovation `(lambda(x), rho(x), 0)`.

    Raises:
        PreconditionError: For a Picard order violating the balance condition, or a frozen
            variant on a model without bounded drift.

    """
    choice = RegressorChoice.parse(variant)
    x = float(x)

    match choice.kind:
        case "chi":
            traj = solve_chi(model, x, t_, cfg)
            params = AveragedParams(*_averages(model, traj, with_upsilon=True), variant="chi")
        case "chi_t_overline":
            traj = solve_chi_overline(model, x, t_, cfg)
            params = AveragedParams(*_averages(model, traj, with_upsilon=False), variant="chi_t_overline")
        case "picard":
            _require_picard_balance(model, choice.order)
            traj = picard_trajectory(model, x, t_, choice.order, cfg)
            params = AveragedParams(*_averages(model, traj, with_upsilon=True), variant="chi")
        case "frozen" | "frozen_overline":
            _require_bounded_drift(model, choice.kind)
            overline = choice.kind == "frozen_overline"
            traj = (solve_chi_overline if overline else solve_chi)(model, x, t_, cfg)
            params = AveragedParams(
                lambda_t=float(model.lam(x)),
                rho_t=float(model.rho(x)),
                upsilon_t=0.0 if overline else float(model.upsilon(x)),
                variant="chi_t_overline" if overline else "chi",
            )

    law = RegressionLaw(
        regressor=float(traj.endpoint),
        scale=model.tau(t_),
        innovation=params.stable_params(model.alpha),
        variant=str(choice),
    )
    log.debug(f"{choice} law at x={x:g}, t={t_:g}: regressor {law.regressor:.6g}, {law.innovation}")

    return law


def principal_density(
    model: ModelSpec,
    x: float,
    y: t.Any,
    t_: float,
    cfg: FlowConfig = DEFAULT_CONFIG,
    spec: InversionSpec = InversionSpec(),
) -> np.ndarray:
    """`t^(-1/alpha) g^{t,x}((y - chi_t(x)) / t^(1/alpha))`, vectorised over `y`."""
    if not 0.0 < t_ <= model.horizon_T:
        raise PreconditionError(f"t={t_} outside (0, {model.horizon_T}]")

    return regression_law(model, x, t_, "chi", cfg).density(y, spec)


def zero_order_density(
    model: ModelSpec,
    x: t.Any,
    y: t.Any,
    t_: float,
    cfg: FlowConfig = DEFAULT_CONFIG,
    spec: InversionSpec = InversionSpec(),
) -> np.ndarray:
    """`p^0_t(x, y) = t^(-1/alpha) g~^{t,y}((kappa_t(y) - x) / t^(1/alpha))`.

    Params:
        model (ModelSpec): The model.
        x (array-like): Start point(s).
        y (array-like): End point(s), broadcast against `x`.
        t_ (float): Time in `(0, T]`.
        cfg (FlowConfig): Settings of the `kappa` flow.
        spec (InversionSpec): Density inversion settings.

    Returns:
        (np.ndarray): Values of the broadcast shape of `x` and `y`.

    """
    if not 0.0 < t_ <= model.horizon_T:
        raise PreconditionError(f"t={t_} outside (0, {model.horizon_T}]")

    x_b, y_b = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ends, inverse = np.unique(y_b.ravel(), return_inverse=True)
    x_flat = x_b.ravel()

    traj = solve_kappa(model, ends, t_, cfg)
    lam_t, rho_t, upsilon_t = (np.atleast_1d(v) for v in _averages(model, traj, with_upsilon=True))
    kappa = np.atleast_1d(traj.endpoint)
    tau = model.tau(t_)

    out = np.empty(x_flat.shape)
    for j in range(ends.size):
        rows = inverse == j
        law = StableParams(alpha=model.alpha, lam=lam_t[j], rho=rho_t[j], upsilon=upsilon_t[j])
        out[rows] = stable_density(law, (kappa[j] - x_flat[rows]) / tau, spec) / tau

    return out.reshape(x_b.shape)


def time_integrated_exponent(
    model: ModelSpec, z: float, t_: float, xi: t.Any, cfg: FlowConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """`int_0^t int (e^{iu xi} - 1 - iu xi 1_{|u| <= s^(1/alpha)}) mu(kappa_s(z); du) ds` on the kappa mesh.

    Moving the truncation from 1 to `s^(1/alpha)` adds `i xi upsilon I(s^(1/alpha))` to the
    exponent at time `s`; nodes of zero weight are left out.
    """
    xi = np.asarray(xi, dtype=float)
    traj = solve_kappa(model, float(z), t_, cfg)
    used = traj.weights != 0.0
    weights, times, states = traj.weights[used], traj.times[used], traj.states[used]

    lam_int = float(weights @ model.lam(states))
    lam_rho_int = float(weights @ model.lam_rho(states))
    cut = stable_truncation_integral(model.alpha, times ** (1.0 / model.alpha))
    shift = float(weights @ (model.upsilon(states) * cut))

    return (
        lam_int * symmetric_exponent(model.alpha, xi)
        + lam_rho_int * asymmetric_exponent(model.alpha, xi)
        + 1j * xi * shift
    )


def zero_order_column(
    model: ModelSpec,
    y: t.Any,
    t_: float,
    x0: float,
    h: float,
    n: int,
    cfg: FlowConfig = DEFAULT_CONFIG,
) -> ZeroOrderColumns:
    """`p^0_t(., y)` on the grid `x0 + i h`, `i < n`, for each `y`, with its `x`-derivatives.

    All transforms of one column come from FFT inversions on the matching `w` grid, which runs
    in the opposite direction to `x`.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    traj = solve_kappa(model, y, t_, cfg)
    lam_t, rho_t, upsilon_t = (np.atleast_1d(v) for v in _averages(model, traj, with_upsilon=True))
    kappa = np.atleast_1d(traj.endpoint)

    tau = model.tau(t_)
    dw = h / tau
    w0 = (kappa - (x0 + (n - 1) * h)) / tau

    def column(which: str) -> np.ndarray:
        values = transform_grid_columns(model.alpha, lam_t, rho_t, upsilon_t, w0, dw, n, which)
        return values[:, ::-1]

    return ZeroOrderColumns(
        y=y,
        kappa=kappa,
        params=AveragedParams(lambda_t=lam_t, rho_t=rho_t, upsilon_t=upsilon_t, variant="kappa_tilde"),
        scale=tau,
        density=column("density") / tau,
        d_x=-column("dw") / tau**2,
        d_xx=column("dww") / tau**3,
        sym=column("sym"),
        asym=column("asym"),
    )


def density_slice(
    model: ModelSpec,
    x: float,
    t_: float,
    variant: RegressorVariant | str = "chi",
    n_points: int = SLICE_POINTS,
    cfg: FlowConfig = DEFAULT_CONFIG,
    spec: InversionSpec = InversionSpec(),
) -> pd.DataFrame:
    """Approximating density in `y` for fixed `(x, t)`, centred on the regressor."""
    law = regression_law(model, x, t_, variant, cfg)
    half = SLICE_SCALE_WIDTH * law.scale + SLICE_PAD
    y = np.linspace(law.regressor - half, law.regressor + half, n_points)

    return pd.DataFrame({"y": y, "value": law.density(y, spec)})


def principal_grid(
    model: ModelSpec,
    x: t.Any,
    t_: float,
    y0: float,
    h: float,
    n: int,
    cfg: FlowConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """`p^main_t(x, y0 + j h)` for every start point `x`, one FFT inversion per row; shape `(len(x), n)`."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    traj = solve_chi(model, x, t_, cfg)
    lam_t, rho_t, upsilon_t = (np.atleast_1d(v) for v in _averages(model, traj, with_upsilon=True))
    chi = np.atleast_1d(traj.endpoint)

    tau = model.tau(t_)
    values = transform_grid_columns(model.alpha, lam_t, rho_t, upsilon_t, (y0 - chi) / tau, h / tau, n, "density")

    return values / tau
