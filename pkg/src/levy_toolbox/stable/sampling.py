"""Stable variates by the Chambers-Mallows-Stuck transform.

A standard variate `Z` has exponent `-|xi|^alpha (1 - i beta tan(pi alpha/2) sgn xi)`
(`-|xi| (1 + i beta (2/pi) sgn xi log|xi|)` for `alpha = 1`). The law with parameters
`(lam, rho, upsilon)` is `sigma Z + m` with `beta = rho`; `sigma` and `m` are read off the
exponent at two points and the map is checked at ten more.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import typing as t

log = logging.getLogger("levy_toolbox.stable.sampling")

from levy_toolbox.exc import ExponentConsistencyError, PreconditionError

from .__methods import exponent_from_parts, stable_exponent
from .classes import StableParams
from .constants import AFFINE_CHECK_POINTS, AFFINE_FIT_POINTS, CONSISTENCY_TOL

import numpy as np


def standard_exponent(alpha: float, beta: t.Any, xi: t.Any) -> np.ndarray:
    """Exponent of the standard stable variate produced by `standard_stable_variates`."""
    xi = np.asarray(xi, dtype=float)
    beta = np.asarray(beta, dtype=float)
    mod = np.abs(xi)

    if alpha == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            log_mod = np.where(mod > 0.0, np.log(np.where(mod > 0.0, mod, 1.0)), 0.0)
        return -mod * (1.0 + 1j * beta * (2.0 / np.pi) * np.sign(xi) * log_mod)

    return -(mod**alpha) * (1.0 - 1j * beta * np.tan(0.5 * np.pi * alpha) * np.sign(xi))


def standard_stable_variates(
    alpha: float, beta: t.Any, rng: np.random.Generator, size: int | tuple[int, ...] | None = None
) -> np.ndarray:
    """Chambers-Mallows-Stuck variates with unit scale, skewness `beta` and zero location."""
    beta = np.asarray(beta, dtype=float)
    shape = beta.shape if size is None else size

    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=shape)
    w = rng.standard_exponential(size=shape)

    if alpha == 1.0:
        half_pi = 0.5 * np.pi
        tilt = half_pi + beta * v
        return (2.0 / np.pi) * (tilt * np.tan(v) - beta * np.log(half_pi * w * np.cos(v) / tilt))

    skew = beta * np.tan(0.5 * np.pi * alpha)
    shift = np.arctan(skew) / alpha
    scale = (1.0 + skew**2) ** (1.0 / (2.0 * alpha))

    numerator = np.sin(alpha * (v + shift)) / np.cos(v) ** (1.0 / alpha)
    tail = (np.cos(v - alpha * (v + shift)) / w) ** ((1.0 - alpha) / alpha)

    return scale * numerator * tail


@dataclass(frozen=True)
class AffineMap:
    sigma: float
    location: float
    beta: float
    max_error: float = 0.0


def _affine_from_points(
    alpha: float, lam: t.Any, rho: t.Any, upsilon: t.Any
) -> tuple[np.ndarray, np.ndarray]:
    fit_scale, fit_shift = AFFINE_FIT_POINTS

    sigma = (-exponent_from_parts(alpha, lam, rho, upsilon, fit_scale).real) ** (1.0 / alpha) / fit_scale
    target = exponent_from_parts(alpha, lam, rho, upsilon, fit_shift).imag
    standard = standard_exponent(alpha, rho, sigma * fit_shift).imag
    location = (target - standard) / fit_shift

    return np.asarray(sigma, dtype=float), np.asarray(location, dtype=float)


def affine_correction(p: StableParams) -> AffineMap:
    """Scale and location mapping the standard variate onto the law `p`.

    Raises:
        ExponentConsistencyError: When the fitted map misses the exponent at a check point by more
            than the consistency tolerance.

    """
    sigma, location = _affine_from_points(p.alpha, p.lam, p.rho, p.upsilon)
    sigma, location = float(sigma), float(location)

    xi = np.asarray(AFFINE_CHECK_POINTS)
    target = stable_exponent(p, xi)
    mapped = 1j * xi * location + standard_exponent(p.alpha, p.rho, sigma * xi)
    error = float(np.max(np.abs(target - mapped) / np.maximum(1.0, np.abs(target))))

    if error > CONSISTENCY_TOL:
        msg = ExponentConsistencyError(f"Affine map from the standard law misses {p} by {error:.3e}")
        log.error(msg)

        raise msg

    return AffineMap(sigma=sigma, location=location, beta=p.rho, max_error=error)


def sample_stable(p: StableParams, count: int, seed: int) -> np.ndarray:
    """`count` i.i.d. samples of the law `p`, deterministic in `seed`."""
    if count < 0:
        raise PreconditionError(f"count must be nonnegative, got {count}")
    if count == 0:
        return np.empty(0)

    affine = affine_correction(p)
    rng = np.random.default_rng(seed)

    return affine.sigma * standard_stable_variates(p.alpha, affine.beta, rng, size=count) + affine.location


def sample_stable_batch(
    alpha: float, lam: t.Any, rho: t.Any, upsilon: t.Any, rng: np.random.Generator
) -> np.ndarray:
    """One sample per entry of the broadcast parameter arrays (used by the Euler scheme)."""
    lam, rho, upsilon = np.broadcast_arrays(
        np.asarray(lam, dtype=float), np.asarray(rho, dtype=float), np.asarray(upsilon, dtype=float)
    )
    if lam.size == 0:
        return np.empty(lam.shape)

    sigma, location = _affine_from_points(alpha, lam, rho, upsilon)

    return sigma * standard_stable_variates(alpha, rho, rng) + location
