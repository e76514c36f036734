from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.model.methods")

from levy_toolbox.exc import QuadratureError
from levy_toolbox.utils.quadrature_utils import power_law_nodes

from .classes import (
    DeltaExponents,
    DensityResidual,
    ModelSpec,
    PointMassResidual,
    SampleGrid,
    ValidationCheck,
    ValidationReport,
    evaluate,
)
from .constants import (
    ACTIVITY_RADII,
    BOUNDED_LIMIT,
    DELTA_SAFETY,
    LEVY_QUAD_RTOL,
    CONSTANCY_POINTS,
)

import numpy as np
from scipy import integrate


def stable_truncation_integral(alpha: float, c: t.Any) -> np.ndarray:
    """`I(c) = int_c^1 u^(-alpha) du`, negative for `c > 1`, infinite at `c = 0` when `alpha >= 1`.

    Params:
        alpha (float): Stability index.
        c (array-like): Truncation level(s), nonnegative.

    Returns:
        (np.ndarray): The integral, elementwise.

    """
    c = np.asarray(c, dtype=float)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if alpha == 1.0:
            return -np.log(c)

        ## (1 - c^(1-alpha)) / (1 - alpha), written with expm1 for alpha close to 1
        return -np.expm1((1.0 - alpha) * np.log(c)) / (1.0 - alpha)


def _check_finite(values: np.ndarray, integral: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        bad = int(np.size(values) - np.count_nonzero(np.isfinite(values)))
        msg = QuadratureError(f"Non-finite value of {integral} at {bad} point(s)")
        log.error(msg)

        raise msg

    return values


def _adaptive_residual_moment(
    nu: DensityResidual, x: float, lo: float, hi: float, power: int, absolute: bool
) -> float:
    def integrand(u: float) -> float:
        q_pos = float(nu.density(x, u))
        q_neg = float(nu.density(x, -u))
        if absolute:
            q_pos, q_neg = abs(q_pos), abs(q_neg)

        return q_pos * u**power + q_neg * (-u) ** power

    pieces = [(lo, min(hi, 1.0))]
    if hi > 1.0:
        pieces.append((max(lo, 1.0), hi))

    total = 0.0
    for a, b in pieces:
        if b <= a:
            continue
        value, _ = integrate.quad(integrand, a, b, epsrel=LEVY_QUAD_RTOL, limit=200)
        total += value

    return total


def residual_moment(
    model: ModelSpec,
    x: t.Any,
    lo: float,
    hi: float,
    power: int = 1,
    absolute: bool = False,
) -> np.ndarray:
    """`int_{lo < |u| <= hi} u^power nu(x, du)` (or against `|nu|`), elementwise in `x`.

    Point masses give finite sums. A density kernel uses a power-law-graded Gauss-Legendre rule
    for `lo > 0` (vectorised over `x`) and adaptive quadrature when the range starts at 0.

    Raises:
        QuadratureError: When the integral is not finite at some `x`.

    """
    x = np.asarray(x, dtype=float)
    nu = model.nu

    if nu is None or hi <= lo:
        return np.zeros_like(x)

    integral = f"int_{{{lo:g} < |u| <= {hi:g}}} u^{power} nu(x, du)"

    if isinstance(nu, PointMassResidual):
        total = np.zeros_like(x)
        for position, weight in zip(nu.positions(x), nu.weights(x)):
            inside = (np.abs(position) > lo) & (np.abs(position) <= hi)
            weight = np.abs(weight) if absolute else weight
            total = total + np.where(inside, weight * position**power, 0.0)

        return _check_finite(total, integral)

    if lo <= 0.0:
        flat = np.array(
            [_adaptive_residual_moment(nu, float(xi), 0.0, hi, power, absolute) for xi in x.ravel()]
        )
        return _check_finite(flat.reshape(x.shape), integral)

    u, w = power_law_nodes(lo, hi)
    xx = x[..., None]
    q_pos = nu.density(xx, u)
    q_neg = nu.density(xx, -u)
    if absolute:
        q_pos, q_neg = np.abs(q_pos), np.abs(q_neg)

    values = (q_pos * u**power + q_neg * (-u) ** power) @ w

    return _check_finite(values, integral)


def compensated_drift(model: ModelSpec, x: t.Any) -> np.ndarray:
    """Compensated drift `b(x) - 1_{alpha<1} int_{|u|<=1} u mu(x,du) - 1_{beta<1} int_{|u|<=1} u nu(x,du)`.

    Params:
        model (ModelSpec): The model.
        x (array-like): State(s).

    Returns:
        (np.ndarray): The compensated drift, same shape as `x`.

    """
    drift = model.b(x)

    if model.alpha < 1.0:
        ## int_{|u|<=1} u mu^(alpha)(x, du) = 2 lambda rho / (1 - alpha)
        drift = drift - model.upsilon(x) / (1.0 - model.alpha)

    if model.beta_activity < 1.0 and model.nu is not None:
        drift = drift - residual_moment(model, x, 0.0, 1.0, power=1)

    return _check_finite(drift, "compensated drift")


def partial_compensator(model: ModelSpec, t_: float, x: t.Any) -> np.ndarray:
    """Partial compensator `m_t(x) = int_{t^(1/alpha) < |u| <= 1} u mu(x, du)`; zero for `t >= 1`."""
    x = np.asarray(x, dtype=float)
    cut = model.tau(t_)

    if cut >= 1.0:
        return np.zeros_like(x)

    stable_part = model.upsilon(x) * stable_truncation_integral(model.alpha, cut)
    residual_part = residual_moment(model, x, cut, 1.0, power=1)

    return _check_finite(stable_part + residual_part, f"partial compensator at t={t_:g}")


def partially_compensated_drift(model: ModelSpec, t_: float, x: t.Any) -> np.ndarray:
    """`b_t(x) = b(x) - m_t(x)`."""
    return model.b(x) - partial_compensator(model, t_, x)


def drift_compensation_gap(model: ModelSpec, t_: float, x: t.Any) -> tuple[np.ndarray, float]:
    """`|b_t(x) - b~(x)|` together with the reference scale `N_alpha(t^(1/alpha))`.

    Returns:
        (tuple[np.ndarray, float]): The gap on `x` and the scale it is bounded by up to a constant.

    """
    from levy_toolbox.kernels import N_beta

    gap = np.abs(partially_compensated_drift(model, t_, x) - compensated_drift(model, x))
    scale = N_beta(model.alpha, min(model.tau(t_), 1.0))

    return gap, float(scale)


def delta_exponents(
    model: ModelSpec, delta_nu: float | None = None, safety: float = DELTA_SAFETY
) -> DeltaExponents:
    """Rate exponents of the error bounds; `delta = safety * min(delta_eta, delta_zeta, delta_beta)`."""
    delta_eta = (model.eta + model.alpha - 1.0) / model.alpha
    delta_zeta = model.zeta / model.alpha
    delta_beta = (model.alpha - model.beta_activity) / model.alpha

    return DeltaExponents(
        delta_eta=delta_eta,
        delta_zeta=delta_zeta,
        delta_beta=delta_beta,
        delta=safety * min(delta_eta, delta_zeta, delta_beta),
        delta_nu=delta_nu,
    )


def is_constant_coefficient(model: ModelSpec) -> bool:
    """True when `b`, `lambda`, `rho` do not vary over the detection points and there is no residual."""
    if model.nu is not None:
        return False

    points = np.asarray(CONSTANCY_POINTS)
    for fn in (model.lambda_fn, model.rho_fn, model.b_fn):
        if np.ptp(evaluate(fn, points)) != 0.0:
            return False

    return True


def holder_quotient(x: np.ndarray, values: np.ndarray, index: float) -> float:
    """Largest `|f(x)-f(y)| / |x-y|^index` over grid pairs with `0 < |x-y| <= 1`."""
    dx = np.abs(x[None, :] - x[:, None])
    df = np.abs(values[None, :] - values[:, None])
    mask = (dx > 0.0) & (dx <= 1.0)

    if not mask.any():
        return 0.0

    return float(np.max(df[mask] / dx[mask] ** index))


def _bounded_check(name: str, measured: float, detail: str = "") -> ValidationCheck:
    passed = bool(np.isfinite(measured) and measured <= BOUNDED_LIMIT)

    return ValidationCheck(name=name, passed=passed, measured=measured, limit=BOUNDED_LIMIT, detail=detail)


def validate_model(model: ModelSpec, grid: SampleGrid | None = None) -> ValidationReport:
    """Check the model assumptions on a grid.

    Every condition becomes a report entry with the measured constant; nothing is raised.

    Params:
        model (ModelSpec): Model to check.
        grid (SampleGrid | None): Sample grid for `x`; defaults to `SampleGrid()`.

    Returns:
        (ValidationReport): One check per condition.

    """
    grid = grid or SampleGrid()
    x = grid.points
    report = ValidationReport(model_name=model.name)

    lam = model.lam(x)
    rho = model.rho(x)

    try:
        drift = compensated_drift(model, x)
        report.checks.append(
            _bounded_check("H^drift", holder_quotient(x, drift, model.eta), f"eta={model.eta}")
        )
    except QuadratureError as exc:
        report.checks.append(ValidationCheck("H^drift", False, float("inf"), detail=str(exc)))

    report.checks.append(
        _bounded_check("H^(alpha)(i).lambda", holder_quotient(x, lam, model.zeta), f"zeta={model.zeta}")
    )
    report.checks.append(
        _bounded_check("H^(alpha)(i).rho", holder_quotient(x, rho, model.zeta), f"zeta={model.zeta}")
    )

    lam_lo, lam_hi = float(np.min(lam)), float(np.max(lam))
    slack = 1e-12 * model.lambda_max
    bounds_ok = lam_lo > 0.0 and lam_lo >= model.lambda_min - slack and lam_hi <= model.lambda_max + slack
    report.checks.append(
        ValidationCheck(
            name="H^(alpha)(ii)",
            passed=bool(bounds_ok),
            measured=lam_lo,
            limit=model.lambda_min,
            detail=f"lambda in [{lam_lo:.6g}, {lam_hi:.6g}], required [{model.lambda_min:g}, {model.lambda_max:g}]",
        )
    )

    rho_max = float(np.max(np.abs(rho)))
    report.checks.append(ValidationCheck("rho_range", rho_max <= 1.0, rho_max, limit=1.0))

    if model.nu is not None:
        report.checks.extend(_residual_checks(model, x))

    for check in report.failed():
        log.warning(f"Model '{model.name}' fails {check.name}: measured {check.measured:.6g} ({check.detail})")

    return report


def _residual_checks(model: ModelSpec, x: np.ndarray) -> list[ValidationCheck]:
    checks: list[ValidationCheck] = []
    beta = model.beta_activity

    activity = 0.0
    for r in ACTIVITY_RADII:
        mass = residual_moment(model, x, r, np.inf, power=0, absolute=True)
        activity = max(activity, float(np.max(r**beta * mass)))
    checks.append(_bounded_check("H^nu.activity", activity, f"beta={beta}"))

    nu = model.nu
    if isinstance(nu, DensityResidual):
        xs = x[:: max(1, x.size // 41)]
        u = np.geomspace(1e-4, 1e4, 81)
        u = np.concatenate((-u[::-1], u))
        q = np.abs(nu.density(xs[:, None], u[None, :]))
        envelope = np.where(np.abs(u) <= 1.0, np.abs(u) ** (-beta - 1.0), np.abs(u) ** (-nu.gamma - 1.0))
        checks.append(
            _bounded_check("H^nu(ii).density_bound", float(np.max(q / envelope)), f"gamma={nu.gamma}")
        )

        q_signed = nu.density(xs[:, None], u[None, :])
        stable = evaluate(model.lambda_fn, xs)[:, None] * (
            1.0 + evaluate(model.rho_fn, xs)[:, None] * np.sign(u)[None, :]
        ) * np.abs(u)[None, :] ** (-model.alpha - 1.0)
        negative = np.clip(-q_signed, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(negative > 0.0, negative / stable, 0.0)
        dominated = float(np.max(ratio))
        checks.append(ValidationCheck("nu_minus_domination", dominated <= 1.0, dominated, limit=1.0))

    elif isinstance(nu, PointMassResidual):
        lowest = min(float(np.min(w)) for w in nu.weights(x))
        checks.append(
            ValidationCheck(
                "nu_minus_domination",
                lowest >= 0.0,
                max(0.0, -lowest),
                limit=0.0,
                detail="negative point masses cannot be dominated by mu^(alpha)",
            )
        )

    return checks


def sde_model(
    alpha: float,
    lam: float,
    rho: float,
    b_fn: t.Callable[..., t.Any],
    sigma_fn: t.Callable[..., t.Any],
    sigma_bounds: tuple[float, float],
    **kwargs: t.Any,
) -> ModelSpec:
    """Model of `dX = b(X) dt + sigma(X-) dZ` with a strictly alpha-stable driver `Z`.

    The driver has Levy density `lam (1 + rho sgn u) |u|^(-alpha-1)`; scaling the jumps by
    `sigma(x) > 0` keeps the skewness and multiplies the intensity by `sigma(x)^alpha`.

    Params:
        alpha (float): Stability index of the driver.
        lam (float): Driver intensity.
        rho (float): Driver skewness.
        b_fn (Callable): Drift.
        sigma_fn (Callable): Positive jump scale.
        sigma_bounds (tuple[float, float]): Lower and upper bound of `sigma`.
        **kwargs: Remaining `ModelSpec` fields (`eta`, `zeta`, `horizon_T`, ...).

    Returns:
        (ModelSpec): The equivalent locally alpha-stable model with `nu = None`.

    """
    lo, hi = sigma_bounds

    def lambda_fn(x: t.Any) -> np.ndarray:
        return lam * np.abs(evaluate(sigma_fn, x)) ** alpha

    def rho_fn(x: t.Any) -> np.ndarray:
        return np.full(np.shape(x), float(rho))

    kwargs.setdefault("name", "sde")

    return ModelSpec(
        alpha=alpha,
        lambda_fn=lambda_fn,
        rho_fn=rho_fn,
        b_fn=b_fn,
        nu=None,
        lambda_min=lam * lo**alpha,
        lambda_max=lam * hi**alpha,
        **kwargs,
    )
