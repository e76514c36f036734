from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.kernels.methods")

from levy_toolbox.exc import PreconditionError
from levy_toolbox.stable import kernel_G_alpha
from levy_toolbox.utils.fit_utils import fit_stable_constant

from .classes import KernelParams, KernelPropertyReport, ResidualBoundParams
from .constants import (
    BINT_TIMES,
    LOG_RANGE,
    MULT_FACTOR,
    PROPERTY_SAMPLES,
    PROPERTY_SEED,
    SUBCONV_SAMPLES,
)

import numpy as np
from scipy import integrate

if t.TYPE_CHECKING:
    from levy_toolbox.model import ModelSpec


def G_abg(kp: KernelParams, x: t.Any, y: t.Any) -> np.ndarray:
    """Three-branch kernel `G_t^(alpha, beta, gamma)(x, y)` of the pointwise residual bound."""
    r = np.abs(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
    inner = min(kp.tau, 1.0)
    tail_factor = kp.t ** (kp.beta / kp.alpha)

    with np.errstate(divide="ignore"):
        return np.where(
            r <= inner,
            kp.t ** (-1.0 / kp.alpha),
            np.where(r <= 1.0, tail_factor * r ** (-kp.beta - 1.0), tail_factor * r ** (-kp.gamma - 1.0)),
        )


def F_abg(kp: KernelParams, x: t.Any) -> np.ndarray:
    """Rescaled kernel with `G_t(x, y) = F_t((y - x) / t^(1/alpha))`."""
    r = np.abs(np.asarray(x, dtype=float))
    outer = kp.t ** (-1.0 / kp.alpha)
    inner = min(1.0, outer)

    with np.errstate(divide="ignore"):
        return np.where(
            r <= inner,
            outer,
            np.where(
                r <= outer,
                outer * r ** (-kp.beta - 1.0),
                kp.t ** ((kp.beta - kp.gamma - 1.0) / kp.alpha) * r ** (-kp.gamma - 1.0),
            ),
        )


def N_beta(beta: float, eps: t.Any) -> np.ndarray:
    """`eps^(1-beta) / |1-beta|`, or `1 + log(1/eps)` for `beta = 1`."""
    eps = np.asarray(eps, dtype=float)

    if beta == 1.0:
        return 1.0 - np.log(eps)

    return eps ** (1.0 - beta) / abs(1.0 - beta)


def residual_bound_params(model: ModelSpec) -> ResidualBoundParams:
    """`beta' = max(beta, alpha - zeta)`, `gamma' = min(alpha, gamma)`, `delta' = (alpha - beta') / alpha`.

    Raises:
        PreconditionError: Without a residual density (no tail index), or if `delta'` is not positive.

    """
    gamma = getattr(model.nu, "gamma", None)
    if gamma is None:
        raise PreconditionError(
            f"Model '{model.name}' has no residual density; the pointwise bound needs its tail index"
        )

    beta_prime = max(model.beta_activity, model.alpha - model.zeta)
    gamma_prime = min(model.alpha, gamma)
    delta_prime = (model.alpha - beta_prime) / model.alpha

    if delta_prime <= 0.0:
        raise PreconditionError(f"delta' = {delta_prime} is not positive for model '{model.name}'")

    return ResidualBoundParams(beta_prime=beta_prime, gamma_prime=gamma_prime, delta_prime=delta_prime)


def _line_integral(fn: t.Callable[[float], float], breakpoints: t.Iterable[float]) -> float:
    """`int_R fn` split at the kinks of the integrand."""
    edges = np.unique(np.asarray(list(breakpoints), dtype=float))

    total = integrate.quad(fn, -np.inf, edges[0], limit=200)[0]
    total += integrate.quad(fn, edges[-1], np.inf, limit=200)[0]
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(fn, lo, hi, limit=200)[0]

    return total


def self_convolution_G(alpha: float, x: float) -> float:
    """`(G^(alpha) * G^(alpha))(x)` by quadrature."""

    def integrand(z: float) -> float:
        return float(kernel_G_alpha(x - z, alpha) * kernel_G_alpha(z, alpha))

    return _line_integral(integrand, (-1.0, 0.0, 1.0, x - 1.0, x, x + 1.0))


def subconvolution(kp: KernelParams, s: float, x: float, y: float) -> float:
    """`(H_{t-s} * H_s)(x, y) = int H_{t-s}(x, z) H_s(z, y) dz` for `H = G^(alpha, beta, gamma)`.

    Params:
        kp (KernelParams): Kernel indices and the total time `t`.
        s (float): Split time in `(0, t)`.
        x (float): Start point.
        y (float): End point.

    Returns:
        (float): The convolution value.

    """
    if not 0.0 < s < kp.t:
        raise PreconditionError(f"Split time s={s} outside (0, {kp.t})")

    first, second = kp.at(kp.t - s), kp.at(s)

    def integrand(z: float) -> float:
        return float(G_abg(first, x, z) * G_abg(second, z, y))

    c1, c2 = min(first.tau, 1.0), min(second.tau, 1.0)
    kinks = (x - 1.0, x - c1, x, x + c1, x + 1.0, y - 1.0, y - c2, y, y + c2, y + 1.0)

    return _line_integral(integrand, kinks)


def kernel_integral(kp: KernelParams) -> float:
    """`int G_t^(alpha, beta, gamma)(0, y) dy` by quadrature."""
    inner = min(kp.tau, 1.0)

    return _line_integral(lambda y: float(G_abg(kp, 0.0, y)), (-1.0, -inner, 0.0, inner, 1.0))


def _log_points(rng: np.random.Generator, n: int) -> np.ndarray:
    lo, hi = LOG_RANGE
    return rng.choice([-1.0, 1.0], size=n) * 10.0 ** rng.uniform(lo, hi, size=n)


def kernel_property_report(
    alpha: float,
    beta: float,
    gamma: float,
    n_samples: int = PROPERTY_SAMPLES,
    seed: int = PROPERTY_SEED,
    horizon_T: float = 1.0,
    n_subconv: int = SUBCONV_SAMPLES,
) -> KernelPropertyReport:
    """Fit the constants of the kernel inequalities on randomised points.

    Every inequality `lhs <= C rhs` is fitted on `n_samples` points and again on a doubled
    sample; the report marks each constant stable when the two fits agree within a factor 2.

    Params:
        alpha (float): Kernel index.
        beta (float): Comparison index, `0 < beta < alpha`.
        gamma (float): Tail index of `G^(alpha, beta, gamma)`.
        n_samples (int): Base sample size.
        seed (int): Seed recorded with every constant.
        horizon_T (float): Largest time drawn for the time-dependent kernels.
        n_subconv (int): Base sample size of the sub-convolution checks (one quadrature per point).

    Returns:
        (KernelPropertyReport): Fitted constants and the integral bounds over a time grid.

    """
    if not 0.0 < beta < alpha:
        raise PreconditionError(f"Need 0 < beta < alpha, got beta={beta}, alpha={alpha}")

    def g_comp(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = _log_points(rng, n)
        return kernel_G_alpha(x, alpha), kernel_G_alpha(x, beta)

    def g_pol(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = _log_points(rng, n)
        return (1.0 + np.abs(x)) ** beta * kernel_G_alpha(x, alpha), kernel_G_alpha(x, alpha - beta)

    def vague(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = _log_points(rng, n)
        ## G^(alpha) is radially nonincreasing, so the sup over |v| <= 1 sits at |x| - 1
        return kernel_G_alpha(np.maximum(np.abs(x) - 1.0, 0.0), alpha), kernel_G_alpha(x, alpha)

    def g_mult(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = _log_points(rng, n)
        return kernel_G_alpha(MULT_FACTOR * x, alpha), kernel_G_alpha(x, alpha)

    def random_kernels(rng: np.random.Generator, n: int) -> list[KernelParams]:
        times = horizon_T * 10.0 ** rng.uniform(-3.0, 0.0, size=n)
        return [KernelParams(alpha, beta, gamma, float(t_)) for t_ in times]

    def vague_f(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        kps = random_kernels(rng, n)
        x = _log_points(rng, n)
        v = rng.uniform(-1.0, 1.0, size=n)
        lhs = np.array([F_abg(kp, xi + vi) for kp, xi, vi in zip(kps, x, v)])
        rhs = np.array([F_abg(kp, xi) for kp, xi in zip(kps, x)])
        return lhs, rhs

    def f_mult(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        kps = random_kernels(rng, n)
        x = _log_points(rng, n)
        lhs = np.array([F_abg(kp, MULT_FACTOR * xi) for kp, xi in zip(kps, x)])
        rhs = np.array([F_abg(kp, xi) for kp, xi in zip(kps, x)])
        return lhs, rhs

    def self_conv(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = _log_points(rng, n)
        lhs = np.array([self_convolution_G(alpha, float(xi)) for xi in x])
        return lhs, kernel_G_alpha(x, alpha)

    def sub_conv(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        kps = random_kernels(rng, n)
        split = rng.uniform(0.01, 0.99, size=n)
        y = _log_points(rng, n)
        lhs = np.array([subconvolution(kp, float(f * kp.t), 0.0, float(yi)) for kp, f, yi in zip(kps, split, y)])
        rhs = np.array([G_abg(kp, 0.0, yi) for kp, yi in zip(kps, y)])
        return lhs, rhs

    report = KernelPropertyReport(alpha=alpha, beta=beta, gamma=gamma)
    checks = {
        "G_comp": (g_comp, n_samples),
        "G_pol": (g_pol, n_samples),
        "vague": (vague, n_samples),
        "G_mult": (g_mult, n_samples),
        "vagueF": (vague_f, n_samples),
        "F_mult": (f_mult, n_samples),
        "sub_conv_simple": (self_conv, n_subconv),
        "H0": (sub_conv, n_subconv),
    }
    for name, (sampler, size) in checks.items():
        report.constants[name] = fit_stable_constant(sampler, size, seed)
        log.debug(f"{name}: C={report.constants[name].value:.4g}, doubled={report.constants[name].value_doubled:.4g}")

    for t_ in BINT_TIMES:
        report.integral_bounds[t_ * horizon_T] = kernel_integral(KernelParams(alpha, beta, gamma, t_ * horizon_T))

    return report
