"""Mollified drift and the deterministic flows built on it.

All flows are integrated in a mesh variable `v` in `[0, 1]` with the classical fourth-order
Runge-Kutta scheme, the time `s(v)` being graded toward the end where the drift is singular.
"""

from __future__ import annotations

from functools import lru_cache
import logging
import typing as t

log = logging.getLogger("levy_toolbox.flows.methods")

from levy_toolbox.exc import IntegratorError, PreconditionError, QuadratureError
from levy_toolbox.model import ModelSpec, SampleGrid, delta_exponents, partially_compensated_drift
from levy_toolbox.utils.fit_utils import fit_stable_constant
from levy_toolbox.utils.quadrature_utils import graded_mesh, simpson_weights

from .classes import FlowConfig, FlowPropertyReport, MollifierSpec, Trajectory
from .constants import (
    CONE_RANGE,
    DRIFT_TIME_FLOOR,
    PROPERTY_SAMPLES,
    PROPERTY_SEED,
    PROPERTY_TIMES,
    PROPERTY_X_RANGE,
    SANDWICH_MIN_GAP,
)

import numpy as np
from scipy import integrate

FlowKind = t.Literal["chi", "kappa", "chi_t", "chi_overline"]
DEFAULT_CONFIG = FlowConfig()


@lru_cache(maxsize=8)
def _hermite_rule(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    ## probabilists' Hermite rule, weights normalised to the standard Gaussian
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)

    return nodes, weights


def mollified_drift(
    model: ModelSpec, t_: float, x: t.Any, spec: MollifierSpec = MollifierSpec()
) -> np.ndarray:
    """`B_t(x) = E b_t(x + sigma(t) Z)` for standard Gaussian `Z`, by Gauss-Hermite quadrature.

    Params:
        model (ModelSpec): The model.
        t_ (float): Time, positive.
        x (array-like): State(s).
        spec (MollifierSpec): Node count and bandwidth.

    Returns:
        (np.ndarray): Mollified drift, same shape as `x`.

    Raises:
        QuadratureError: When `b_t` is not finite at one of the sample points.

    """
    if t_ < 0.0:
        raise PreconditionError(f"Time must be nonnegative, got {t_}")

    x = np.asarray(x, dtype=float)
    nodes, weights = _hermite_rule(spec.n_nodes)
    points = x[..., None] + spec.sigma(t_, model.alpha) * nodes

    values = partially_compensated_drift(model, t_, points)
    finite = np.isfinite(values)
    if not finite.all():
        bad = float(points[~finite].ravel()[0])
        msg = QuadratureError(f"Partially compensated drift at t={t_:g} is not finite at sample point x={bad:.6g}")
        log.error(msg)

        raise msg

    return values @ weights


def mollification_gap(
    model: ModelSpec, t_: float, grid: SampleGrid | None = None, spec: MollifierSpec = MollifierSpec()
) -> float:
    """`sup_x |b_t(x) - B_t(x)|` over the grid."""
    x = (grid or SampleGrid()).points

    return float(np.max(np.abs(partially_compensated_drift(model, t_, x) - mollified_drift(model, t_, x, spec))))


def lipschitz_estimate(
    model: ModelSpec, t_: float, grid: SampleGrid | None = None, spec: MollifierSpec = MollifierSpec()
) -> float:
    """Largest difference quotient of `B_t` between neighbouring grid points."""
    x = (grid or SampleGrid()).points
    values = mollified_drift(model, t_, x, spec)

    return float(np.max(np.abs(np.diff(values)) / np.diff(x)))


class _Clock:
    """Map from the mesh variable `v` to the flow time, the drift time and `ds/dv`."""

    def __init__(self, kind: FlowKind, t_: float, grading: float) -> None:
        self.kind = kind
        self.t = t_
        self.grading = 1.0 if kind == "chi_overline" else grading

    def time(self, v: np.ndarray | float) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.kind == "chi_t":
            return self.t - self.t * (1.0 - v) ** self.grading

        return self.t * v**self.grading

    def drift_time(self, v: float) -> float:
        if self.kind == "chi_overline":
            return self.t
        if self.kind == "chi_t":
            return max(self.t * (1.0 - v) ** self.grading, DRIFT_TIME_FLOOR * self.t)

        return max(self.t * v**self.grading, DRIFT_TIME_FLOOR * self.t)

    def rate(self, v: np.ndarray | float) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.kind == "chi_t":
            return self.t * self.grading * (1.0 - v) ** (self.grading - 1.0)

        return self.t * self.grading * v ** (self.grading - 1.0)


def _field(
    model: ModelSpec, clock: _Clock, spec: MollifierSpec, sign: float
) -> t.Callable[[float, np.ndarray], np.ndarray]:
    def derivative(v: float, state: np.ndarray) -> np.ndarray:
        rate = float(clock.rate(v))
        if rate == 0.0:
            return np.zeros_like(state)

        return sign * rate * mollified_drift(model, clock.drift_time(v), state, spec)

    return derivative


def _rk4(field: t.Callable[[float, np.ndarray], np.ndarray], x0: np.ndarray, n: int) -> np.ndarray:
    h = 1.0 / n
    states = np.empty((n + 1,) + x0.shape)
    states[0] = x0

    state = x0
    for j in range(n):
        v = j * h
        k1 = field(v, state)
        k2 = field(v + 0.5 * h, state + 0.5 * h * k1)
        k3 = field(v + 0.5 * h, state + 0.5 * h * k2)
        k4 = field(v + h, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[j + 1] = state

    return states


def _time_weights(n: int, ds_dv: np.ndarray, t_: float) -> np.ndarray:
    ## Simpson in the mesh variable, rescaled so that constants integrate exactly
    weights = simpson_weights(n) * ds_dv / n

    return weights * (t_ / weights.sum())


def _trajectory(clock: _Clock, states: np.ndarray, n: int) -> Trajectory:
    v = np.linspace(0.0, 1.0, n + 1)
    times = clock.time(v)
    times[0], times[-1] = 0.0, clock.t
    weights = _time_weights(n, clock.rate(v), clock.t)

    return Trajectory(times=times, states=states, weights=weights)


def solve_flow(
    model: ModelSpec, x: t.Any, t_: float, kind: FlowKind, cfg: FlowConfig = DEFAULT_CONFIG
) -> Trajectory:
    """Integrate one of the flows with step doubling until the endpoint settles.

    Raises:
        IntegratorError: When doubling the step count `max_doublings` times never brings the
            endpoint change under `rtol`.

    """
    if not t_ > 0.0:
        raise PreconditionError(f"Flow horizon must be positive, got {t_}")

    x0 = np.asarray(x, dtype=float)
    clock = _Clock(kind, float(t_), cfg.grading_for(model.alpha))
    field = _field(model, clock, cfg.mollifier, -1.0 if kind == "kappa" else 1.0)

    n = cfg.n_steps
    coarse = _rk4(field, x0, n)
    change = np.inf
    for _ in range(cfg.max_doublings):
        fine = _rk4(field, x0, 2 * n)
        n *= 2
        change = float(np.max(np.abs(fine[-1] - coarse[-1]) / np.maximum(1.0, np.abs(fine[-1]))))
        if change <= cfg.rtol:
            log.debug(f"{kind} flow to t={t_:g} settled with {n} steps (change {change:.2e})")
            return _trajectory(clock, fine, n)
        coarse = fine

    msg = IntegratorError(
        f"{kind} flow to t={t_:g} did not settle: endpoint change {change:.3e} > {cfg.rtol:g} at {n} steps"
    )
    log.error(msg)

    raise msg


def solve_chi(model: ModelSpec, x: t.Any, t_: float, cfg: FlowConfig = DEFAULT_CONFIG) -> Trajectory:
    """`d chi_s / ds = B_s(chi_s)`, `chi_0 = x`."""
    return solve_flow(model, x, t_, "chi", cfg)


def solve_kappa(model: ModelSpec, y: t.Any, t_: float, cfg: FlowConfig = DEFAULT_CONFIG) -> Trajectory:
    """`d kappa_s / ds = -B_s(kappa_s)`, `kappa_0 = y`."""
    return solve_flow(model, y, t_, "kappa", cfg)


def solve_chi_t(model: ModelSpec, x: t.Any, t_: float, cfg: FlowConfig = DEFAULT_CONFIG) -> Trajectory:
    """Auxiliary family `d chi^t_s / ds = B_{t-s}(chi^t_s)`, `chi^t_0 = x`."""
    return solve_flow(model, x, t_, "chi_t", cfg)


def solve_chi_overline(
    model: ModelSpec, x: t.Any, t_: float, cfg: FlowConfig = DEFAULT_CONFIG
) -> Trajectory:
    """Frozen-coefficient flow `d chi_s / ds = B_t(chi_s)` on `[0, t]`."""
    return solve_flow(model, x, t_, "chi_overline", cfg)


def picard_trajectory(
    model: ModelSpec, x: t.Any, t_: float, k: int, cfg: FlowConfig = DEFAULT_CONFIG
) -> Trajectory:
    """`k`-th Picard iterate `chi^(j+1)_s = x + int_0^s B_r(chi^(j)_r) dr` on the graded mesh."""
    if k < 0:
        raise PreconditionError(f"Picard order must be nonnegative, got {k}")

    x0 = np.asarray(x, dtype=float)
    n = cfg.n_steps
    v, s, ds_dv = graded_mesh(float(t_), n, cfg.grading_for(model.alpha))
    weights = _time_weights(n, ds_dv, float(t_))
    drift_times = np.maximum(s, DRIFT_TIME_FLOOR * float(t_))

    path = np.broadcast_to(x0, (n + 1,) + x0.shape).copy()
    for _ in range(k):
        rate = np.zeros_like(path)
        for j in range(n + 1):
            if ds_dv[j] != 0.0:
                rate[j] = ds_dv[j] * mollified_drift(model, drift_times[j], path[j], cfg.mollifier)
        path = x0 + integrate.cumulative_simpson(rate, dx=1.0 / n, axis=0, initial=0.0)

    return Trajectory(times=s, states=path, weights=weights)


def picard_regressor(
    model: ModelSpec, x: t.Any, t_: float, k: int, cfg: FlowConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Endpoint `chi^(k)_t(x)` of the Picard iteration; `k = 0` returns `x`."""
    if k == 0:
        return np.asarray(x, dtype=float)

    return picard_trajectory(model, x, t_, k, cfg).endpoint


def _own_times(traj: Trajectory, s: np.ndarray) -> np.ndarray:
    ## column j of a vector trajectory evaluated at its own time s[j]
    return np.diagonal(np.atleast_2d(traj.at(s)))


def _flow_sample(
    model: ModelSpec, rng: np.random.Generator, n: int, times: t.Sequence[float], cfg: FlowConfig
) -> dict[str, np.ndarray]:
    t_draw = rng.choice(np.asarray(times, dtype=float), size=n)
    x = rng.uniform(-PROPERTY_X_RANGE, PROPERTY_X_RANGE, size=n)
    y = rng.uniform(-PROPERTY_X_RANGE, PROPERTY_X_RANGE, size=n)
    s = t_draw * rng.uniform(size=n)

    sample = {"t": t_draw, "s": s, "x": x, "y": y}
    for name in ("kappa_t", "kappa_ts", "chi_t_s", "chi_s"):
        sample[name] = np.empty(n)

    for t_ in np.unique(t_draw):
        idx = np.flatnonzero(t_draw == t_)
        kappa = solve_kappa(model, y[idx], float(t_), cfg)
        chi_t = solve_chi_t(model, x[idx], float(t_), cfg)
        chi = solve_chi(model, x[idx], float(t_), cfg)

        sample["kappa_t"][idx] = kappa.endpoint
        sample["kappa_ts"][idx] = _own_times(kappa, t_ - s[idx])
        sample["chi_t_s"][idx] = _own_times(chi_t, s[idx])
        sample["chi_s"][idx] = _own_times(chi, s[idx])

    return sample


def flow_property_report(
    model: ModelSpec,
    n_samples: int = PROPERTY_SAMPLES,
    seed: int = PROPERTY_SEED,
    times: t.Sequence[float] = PROPERTY_TIMES,
    cfg: FlowConfig = DEFAULT_CONFIG,
) -> FlowPropertyReport:
    """Fit the constants of the flow inequalities on random `(x, y, s, t)`.

    Each constant is fitted on `n_samples` points and again on a doubled sample, as in the
    kernel property checks.

    Params:
        model (ModelSpec): The model.
        n_samples (int): Base sample size.
        seed (int): Seed of the random points.
        times (Sequence[float]): Times `t` the samples are drawn from, each in `(0, T]`.
        cfg (FlowConfig): Flow solver settings.

    Returns:
        (FlowPropertyReport): Sandwich, proximity and growth-cone constants.

    Raises:
        PreconditionError: When a time lies outside `(0, T]` or `n_samples < 1`.

    """
    if n_samples < 1:
        raise PreconditionError(f"Need at least one sample, got {n_samples}")
    if not all(0.0 < t_ <= model.horizon_T for t_ in times):
        msg = PreconditionError(f"Flow property times must lie in (0, {model.horizon_T:g}], got {list(times)}")
        log.error(msg)

        raise msg

    delta = delta_exponents(model).delta

    def sandwich(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        sample = _flow_sample(model, rng, n, times, cfg)
        base = np.abs(sample["kappa_t"] - sample["x"])
        gap = np.abs(sample["kappa_ts"] - sample["chi_t_s"])
        keep = (base > SANDWICH_MIN_GAP) & (gap > 0.0)

        lhs = np.abs(np.log(np.where(keep, gap, 1.0) / np.where(keep, base, 1.0)))
        return np.where(keep, lhs, 0.0), np.where(keep, sample["t"] ** delta, 0.0)

    def proximity(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        sample = _flow_sample(model, rng, n, times, cfg)
        return sample["chi_t_s"] - sample["chi_s"], sample["t"] ** (1.0 / model.alpha)

    def cone(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = CONE_RANGE
        t_draw = rng.choice(np.asarray(times, dtype=float), size=n)
        x = rng.choice([-1.0, 1.0], size=n) * np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))

        ratio = np.empty(n)
        for t_ in np.unique(t_draw):
            idx = np.flatnonzero(t_draw == t_)
            ratio[idx] = np.abs(solve_chi(model, x[idx], float(t_), cfg).endpoint) / np.abs(x[idx])

        return np.maximum(ratio, 1.0 / ratio), np.ones(n)

    report = FlowPropertyReport(model_name=model.name, delta=delta)
    for name, sampler in (("sandwich", sandwich), ("proximity", proximity), ("cone", cone)):
        report.constants[name] = fit_stable_constant(sampler, n_samples, seed)
        log.debug(f"{name}: C={report.constants[name].value:.4g}, doubled={report.constants[name].value_doubled:.4g}")

    return report
