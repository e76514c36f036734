from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.stable.operators")

from levy_toolbox.exc import PreconditionError, QuadratureError
from levy_toolbox.model import stable_truncation_integral

from .constants import QUAD_LIMIT, TAYLOR_CUTOFF

import numpy as np
from scipy import integrate

RealFn = t.Callable[[np.ndarray], np.ndarray]


def kernel_G_alpha(x: t.Any, alpha: float) -> np.ndarray:
    """`G^(alpha)(x) = min(|x|^(-alpha-1), 1)`."""
    if not alpha > 0.0:
        raise PreconditionError(f"alpha={alpha} must be positive")

    mod = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        return np.minimum(mod ** (-alpha - 1.0), 1.0)


def _scalar(fn: RealFn, x: float) -> float:
    return float(np.ravel(fn(np.asarray([x], dtype=float)))[0])


def frac_op(
    f: RealFn,
    x: t.Any,
    kind: t.Literal["sym", "asym"],
    alpha: float,
    df: RealFn | None = None,
    d2f: RealFn | None = None,
    t_scale: float = 1.0,
) -> np.ndarray:
    """Real-space fractional operators.

    `L^sym f(x) = int (f(x+u) - f(x) - u f'(x) 1_{|u|<=1}) |u|^(-alpha-1) du` and
    `L^asym f(x)` with the extra factor `sgn u`. Jumps below a small cutoff use the
    second-order Taylor expansion of the integrand; the rest is adaptive quadrature split at
    `|u| = 1`. With `t_scale = s` the operator is applied to `y -> f(y / s)` instead of `f`.

    Params:
        f (Callable): Vectorised function.
        x (array-like): Evaluation point(s).
        kind (str): `sym` or `asym`.
        alpha (float): Stability index.
        df (Callable | None): First derivative, required for `asym`.
        d2f (Callable | None): Second derivative, required for `sym`.
        t_scale (float): Spatial scale of the argument.

    Returns:
        (np.ndarray): Operator values, same shape as `x`.

    Raises:
        QuadratureError: When a region of the jump integral does not give a finite value.

    """
    if kind not in ("sym", "asym"):
        raise PreconditionError(f"Unknown operator kind '{kind}', expected sym or asym")
    if kind == "sym" and d2f is None:
        raise PreconditionError("The symmetric operator needs the second derivative for small jumps")
    if kind == "asym" and df is None:
        raise PreconditionError("The asymmetric operator needs the first derivative")

    x_arr = np.asarray(x, dtype=float)
    scaled = x_arr / t_scale
    power = -alpha - 1.0
    eps = TAYLOR_CUTOFF

    def value_at(z: float) -> float:
        f0 = _scalar(f, z)

        if kind == "sym":

            def integrand(u: float) -> float:
                return (_scalar(f, z + u) + _scalar(f, z - u) - 2.0 * f0) * u**power

            ## f(z+u) + f(z-u) - 2 f(z) ~ f''(z) u^2 on (0, eps)
            near = _scalar(d2f, z) * eps ** (2.0 - alpha) / (2.0 - alpha)
        else:
            slope = _scalar(df, z)

            def integrand(u: float) -> float:
                compensator = 2.0 * u * slope if u <= 1.0 else 0.0
                return (_scalar(f, z + u) - _scalar(f, z - u) - compensator) * u**power

            ## odd part vanishes to second order
            near = 0.0

        regions = {"small jumps": (eps, 1.0), "large jumps": (1.0, np.inf)}
        total = near
        for region, (lo, hi) in regions.items():
            value, _ = integrate.quad(integrand, lo, hi, limit=QUAD_LIMIT, epsabs=1e-12, epsrel=1e-10)
            if not np.isfinite(value):
                msg = QuadratureError(f"Fractional operator diverges over {region} |u| in ({lo}, {hi}] at x={z}")
                log.error(msg)

                raise msg
            total += value

        return total

    values = np.array([value_at(float(z)) for z in scaled.ravel()]).reshape(x_arr.shape)

    if kind == "asym" and t_scale != 1.0:
        ## the compensation window |u| <= 1 becomes |v| <= 1/t_scale after rescaling
        slopes = np.array([_scalar(df, float(z)) for z in scaled.ravel()]).reshape(x_arr.shape)
        values = values + 2.0 * slopes * stable_truncation_integral(alpha, 1.0 / t_scale)

    return values * t_scale ** (-alpha)
