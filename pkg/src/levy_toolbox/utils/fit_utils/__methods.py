"""Fitted constants and log-log slopes.

Inequalities of the form `lhs <= C * rhs` are checked by reporting the largest observed
ratio. A constant counts as stable when re-fitting on a doubled sample moves it by less
than a factor of two.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import typing as t

log = logging.getLogger("levy_toolbox.utils.fit_utils")

import numpy as np

DOUBLING_DRIFT_LIMIT: float = 2.0


@dataclass(frozen=True)
class FittedConstant:
    value: float
    value_doubled: float | None = None
    seed: int | None = None
    n_samples: int = 0

    @property
    def drift(self) -> float:
        if self.value_doubled is None:
            return 1.0
        lo, hi = sorted((self.value, self.value_doubled))
        if lo <= 0.0:
            return 1.0 if hi <= 0.0 else float("inf")

        return hi / lo

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.value))

    @property
    def stable(self) -> bool:
        return self.finite and self.drift < DOUBLING_DRIFT_LIMIT


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    halfwidth: float = 0.0


def fit_constant(lhs: np.ndarray, rhs: np.ndarray, floor: float = 0.0) -> float:
    """Largest ratio `lhs / rhs` over points where `rhs` is positive.

    Params:
        lhs (np.ndarray): Left-hand side of the inequality (absolute values are taken).
        rhs (np.ndarray): Comparison kernel, nonnegative.
        floor (float): Points with `|lhs| <= floor` are ignored (quadrature noise).

    Returns:
        (float): The fitted constant; 0.0 when no point qualifies.

    """
    lhs = np.abs(np.asarray(lhs, dtype=float)).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()

    mask = (rhs > 0.0) & (lhs > floor)
    if not mask.any():
        return 0.0

    return float(np.max(lhs[mask] / rhs[mask]))


def fit_stable_constant(
    ratio_sample: t.Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]],
    n_samples: int,
    seed: int,
) -> FittedConstant:
    """Fit a constant on `n_samples` random points and again on `2 * n_samples`.

    Params:
        ratio_sample (Callable): `(rng, n) -> (lhs, rhs)` drawing `n` random test points.
        n_samples (int): Size of the first sample.
        seed (int): Seed of the generator; recorded in the result.

    Returns:
        (FittedConstant): Both fitted values, the seed and the base sample size.

    """
    rng = np.random.default_rng(seed)
    first = fit_constant(*ratio_sample(rng, n_samples))
    ## The doubled sample contains the first one
    second_extra = fit_constant(*ratio_sample(rng, n_samples))
    doubled = max(first, second_extra)

    return FittedConstant(value=first, value_doubled=doubled, seed=seed, n_samples=n_samples)


def fit_loglog_slope(t_values: t.Sequence[float], d_values: t.Sequence[float]) -> SlopeFit:
    """Least-squares slope of `log d` against `log t`."""
    log_t = np.log(np.asarray(t_values, dtype=float))
    log_d = np.log(np.asarray(d_values, dtype=float))

    slope, intercept = np.polyfit(log_t, log_d, 1)

    return SlopeFit(slope=float(slope), intercept=float(intercept))


def bootstrap_slope_halfwidth(
    t_values: t.Sequence[float],
    d_values: t.Sequence[float],
    n_boot: int = 2000,
    seed: int = 0,
    level: float = 0.95,
) -> float:
    """Residual-bootstrap half-width of the log-log slope at the given confidence level."""
    log_t = np.log(np.asarray(t_values, dtype=float))
    log_d = np.log(np.asarray(d_values, dtype=float))

    slope, intercept = np.polyfit(log_t, log_d, 1)
    fitted = intercept + slope * log_t
    residuals = log_d - fitted

    if np.allclose(residuals, 0.0, atol=1e-14):
        return 0.0

    rng = np.random.default_rng(seed)
    draws = rng.choice(residuals, size=(n_boot, residuals.size), replace=True)
    ## polyfit accepts a 2-D right-hand side, one column per bootstrap replicate
    boot = np.polyfit(log_t, (fitted[None, :] + draws).T, 1)[0]

    lo, hi = np.quantile(boot, [(1.0 - level) / 2.0, (1.0 + level) / 2.0])

    return float(0.5 * (hi - lo))
