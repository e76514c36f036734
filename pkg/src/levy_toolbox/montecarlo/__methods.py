"""Euler simulation of the model process and distances to the approximating law.

One Euler step from `X` freezes the coefficients at `X`: drift `b(X) dt`, a stable increment
`dt^(1/alpha) U` with `U ~ (lambda(X), rho(X), 0)` shifted by `-dt upsilon(X) I(dt^(1/alpha))`
(this moves the truncation of the stable part from `dt^(1/alpha)` back to 1), and residual jumps
larger than `jump_cut`. Smaller residual jumps are replaced by their compensator. Jumps of a residual
density are drawn by thinning continuous candidates from a piecewise power-law envelope.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import logging
import math
import typing as t

log = logging.getLogger("levy_toolbox.montecarlo.methods")

from levy_toolbox.exc import PathExplosionError, PreconditionError
from levy_toolbox.flows import FlowConfig
from levy_toolbox.model import (
    DensityResidual,
    ModelSpec,
    PointMassResidual,
    delta_exponents,
    is_constant_coefficient,
    residual_moment,
    stable_truncation_integral,
)
from levy_toolbox.regression import RegressorChoice, regression_law
from levy_toolbox.stable import sample_stable_batch
from levy_toolbox.utils.env_utils import resolve_workers
from levy_toolbox.utils.fit_utils import bootstrap_slope_halfwidth, fit_loglog_slope
from levy_toolbox.utils.quadrature_utils import power_law_nodes

from .classes import BiasCheck, DistanceRow, EulerConfig, ExperimentResult, noise_floor
from .constants import (
    BOOTSTRAP_DRAWS,
    EXPLOSION_LIMIT,
    FROZEN_VARIANTS,
    MIN_T_POINTS,
    SLOPE_FRACTION,
    STATUS_EXACT,
    STATUS_INCONCLUSIVE,
    STATUS_OK,
    THINNING_WINDOW_HALFWIDTH,
    THINNING_WINDOW_POINTS,
    THINNING_SAFETY,
)

import numpy as np

DEFAULT_CONFIG = EulerConfig()
DEFAULT_FLOW = FlowConfig()


@dataclass(frozen=True)
class _ThinningBound:
    """Dominating jump density `scale * |u|^(-beta-1)` on `cut < |u| <= 1` and `scale * |u|^(-gamma-1)` beyond.

    Also carries the compensator of the residual jumps with `cut < |u| <= 1` on a table in `x`.
    """

    scale: float
    beta: float
    gamma: float
    cut: float
    inner_mass: float
    outer_mass: float
    table_x: np.ndarray
    compensator: np.ndarray

    @property
    def rate(self) -> float:
        return 2.0 * self.scale * (self.inner_mass + self.outer_mass)

    def envelope(self, u: np.ndarray) -> np.ndarray:
        a = np.abs(u)
        return np.where(a <= 1.0, a ** (-self.beta - 1.0), a ** (-self.gamma - 1.0))

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Candidate jump sizes from the normalised envelope, by inverse CDF on each piece."""
        inner = rng.uniform(size=size) * (self.inner_mass + self.outer_mass) < self.inner_mass
        v = rng.uniform(size=size)

        if self.beta == 0.0:
            a_inner = self.cut ** (1.0 - v)
        else:
            a_inner = (self.cut**-self.beta - v * (self.cut**-self.beta - 1.0)) ** (-1.0 / self.beta)
        a_outer = 1.0 + rng.pareto(self.gamma, size=size)

        sign = np.where(rng.uniform(size=size) < 0.5, -1.0, 1.0)

        return sign * np.where(inner, a_inner, a_outer)


def _envelope_mass(exponent: float, lo: float, hi: float) -> float:
    """`int_lo^hi a^(-exponent-1) da` with `hi` possibly infinite."""
    if hi <= lo:
        return 0.0
    if exponent == 0.0:
        return math.log(hi / lo)

    return (lo**-exponent - (0.0 if math.isinf(hi) else hi**-exponent)) / exponent


def _thinning_bound(model: ModelSpec, x0: float, jump_cut: float) -> _ThinningBound:
    nu = t.cast(DensityResidual, model.nu)

    u_pos, _ = power_law_nodes(jump_cut, np.inf)
    u = np.concatenate((u_pos, -u_pos))

    window = np.linspace(x0 - THINNING_WINDOW_HALFWIDTH, x0 + THINNING_WINDOW_HALFWIDTH, THINNING_WINDOW_POINTS)
    q = nu.density(window[:, None], u[None, :])
    if np.min(q) < 0.0:
        msg = PreconditionError("Residual kernel takes negative values; only positive kernels can be simulated")
        log.error(msg)

        raise msg

    bound = _ThinningBound(
        scale=0.0,
        beta=nu.beta,
        gamma=nu.gamma,
        cut=jump_cut,
        inner_mass=_envelope_mass(nu.beta, jump_cut, 1.0),
        outer_mass=_envelope_mass(nu.gamma, max(jump_cut, 1.0), math.inf),
        table_x=window,
        compensator=residual_moment(model, window, jump_cut, 1.0, power=1),
    )
    scale = THINNING_SAFETY * float(np.max(q / bound.envelope(u)[None, :]))
    bound = replace(bound, scale=scale)
    log.debug(f"Thinning envelope scale {scale:.6g}, candidate rate {bound.rate:.6g}")

    return bound


def _accept(
    nu: DensityResidual, x: np.ndarray, u: np.ndarray, bound: _ThinningBound, rng: np.random.Generator
) -> np.ndarray:
    ratio = nu.density(x, u) / (bound.scale * bound.envelope(u))

    bad = ratio > 1.0
    if np.any(bad):
        msg = PreconditionError(
            f"Residual density exceeds its thinning bound at x={float(x[np.argmax(bad)]):g} "
            f"(ratio {float(np.max(ratio)):.4g}); the bound holds on |x - x0| <= {THINNING_WINDOW_HALFWIDTH:g}"
        )
        log.error(msg)

        raise msg

    return rng.uniform(size=u.shape) < ratio


def _point_mass_jumps(
    nu: PointMassResidual, x: np.ndarray, step: float, jump_cut: float, rng: np.random.Generator
) -> np.ndarray:
    total = np.zeros_like(x)

    for position, weight in zip(nu.positions(x), nu.weights(x)):
        if np.any(weight < 0.0):
            msg = PreconditionError("Residual atom with negative weight cannot be simulated")
            log.error(msg)

            raise msg

        large = np.abs(position) > jump_cut
        counts = rng.poisson(np.where(large, weight * step, 0.0))
        total += counts * position
        ## compensator of the simulated jumps with |u| <= 1
        total -= np.where(large & (np.abs(position) <= 1.0), weight * position * step, 0.0)

    return total


def _thinned_jumps(
    nu: DensityResidual, x: np.ndarray, step: float, bound: _ThinningBound, rng: np.random.Generator
) -> np.ndarray:
    total = -step * np.interp(x, bound.table_x, bound.compensator)

    counts = rng.poisson(bound.rate * step, size=x.shape)
    n_rounds = int(counts.max()) if counts.size else 0

    for k in range(1, n_rounds + 1):
        idx = np.flatnonzero(counts >= k)
        u = bound.draw(idx.size, rng)

        accept = _accept(nu, x[idx], u, bound, rng)
        total[idx[accept]] += u[accept]

    return total


def _simulate_chunk(
    model: ModelSpec,
    x0: float,
    n_steps: int,
    step: float,
    cfg: EulerConfig,
    bound: _ThinningBound | None,
    seed: np.random.SeedSequence,
    count: int,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    alpha = model.alpha
    tau = step ** (1.0 / alpha)
    shift = step * float(stable_truncation_integral(alpha, tau))

    x = np.full(count, float(x0))

    for k in range(1, n_steps + 1):
        lam, rho = model.lam(x), model.rho(x)

        increment = model.b(x) * step - shift * 2.0 * lam * rho
        increment += tau * sample_stable_batch(alpha, lam, rho, 0.0, rng)

        if isinstance(model.nu, PointMassResidual):
            increment += _point_mass_jumps(model.nu, x, step, cfg.jump_cut, rng)
        elif isinstance(model.nu, DensityResidual) and bound is not None:
            increment += _thinned_jumps(model.nu, x, step, bound, rng)

        x = x + increment

        exploded = ~np.isfinite(x) | (np.abs(x) > EXPLOSION_LIMIT)
        if np.any(exploded):
            msg = PathExplosionError(
                f"{int(np.count_nonzero(exploded))} path(s) left |X| <= {EXPLOSION_LIMIT:g} at step {k} of {n_steps}",
                step=k,
            )
            log.error(msg)

            raise msg

    return x


def sample_residual_jumps(
    model: ModelSpec, x: float, count: int, jump_cut: float = DEFAULT_CONFIG.jump_cut, seed: int = 0
) -> np.ndarray:
    """`count` jump sizes from `nu(x, du)` restricted to `|u| > jump_cut`, by thinning.

    These are the residual jumps the Euler scheme adds at state `x`.

    Raises:
        PreconditionError: When the model has no residual density or no mass beyond `jump_cut`.

    """
    if not isinstance(model.nu, DensityResidual):
        raise PreconditionError(f"Model '{model.name}' has no residual jump density")
    if count < 0:
        raise PreconditionError(f"count must be nonnegative, got {count}")

    bound = _thinning_bound(model, float(x), jump_cut)
    if not bound.rate > 0.0:
        raise PreconditionError(f"Residual density of '{model.name}' has no mass beyond |u| = {jump_cut:g}")

    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    n_kept = 0
    while n_kept < count:
        u = bound.draw(2 * (count - n_kept) + 64, rng)
        u = u[_accept(model.nu, np.full(u.size, float(x)), u, bound, rng)]
        kept.append(u)
        n_kept += u.size

    return np.concatenate(kept)[:count] if kept else np.empty(0)


def simulate_paths(model: ModelSpec, x0: float, t_: float, cfg: EulerConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Terminal values `X_t` of `cfg.n_paths` Euler paths started at `x0`.

    Paths are split into chunks with seeds spawned from `cfg.seed`, so the output depends on the
    seed and the chunk size only, never on the number of workers.

    Raises:
        PreconditionError: When `dt > t / 16` or the residual kernel cannot be simulated.
        PathExplosionError: When a path leaves `|X| <= 1e12`; the error names the step.

    """
    n_steps = cfg.n_steps(t_)
    if cfg.n_paths == 0:
        return np.empty(0)

    step = t_ / n_steps
    bound = _thinning_bound(model, float(x0), cfg.jump_cut) if isinstance(model.nu, DensityResidual) else None

    sizes = [cfg.chunk_size] * (cfg.n_paths // cfg.chunk_size)
    if cfg.n_paths % cfg.chunk_size:
        sizes.append(cfg.n_paths % cfg.chunk_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def run(args: tuple[np.random.SeedSequence, int]) -> np.ndarray:
        return _simulate_chunk(model, float(x0), n_steps, step, cfg, bound, *args)

    workers = min(resolve_workers(cfg.workers), len(sizes))
    log.info(f"Simulating {cfg.n_paths} path(s) to t={t_:g} in {n_steps} steps, {len(sizes)} chunk(s), {workers} worker(s)")

    if workers == 1:
        chunks = [run(job) for job in zip(seeds, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, zip(seeds, sizes)))

    return np.concatenate(chunks)


def sample_regression(
    model: ModelSpec,
    x: float,
    t_: float,
    variant: str | RegressorChoice = "chi",
    count: int = 0,
    seed: int = 0,
    flow: FlowConfig = DEFAULT_FLOW,
) -> np.ndarray:
    """`count` samples of `f_t(x) + t^(1/alpha) U` for the chosen regressor variant."""
    if count < 0:
        raise PreconditionError(f"count must be nonnegative, got {count}")

    return regression_law(model, x, t_, variant, flow).sample(count, seed)


def _empirical_cdfs(a: t.Any, b: t.Any) -> tuple[np.ndarray, np.ndarray]:
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        msg = PreconditionError(f"Distances need two non-empty samples, got sizes {a.size} and {b.size}")
        log.error(msg)

        raise msg

    pooled = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size

    return cdf_a, cdf_b


def ks_distance(a: t.Any, b: t.Any) -> float:
    """Kolmogorov distance `sup |F_a - F_b|` of the two empirical CDFs.

    Raises:
        PreconditionError: When either sample is empty.

    """
    cdf_a, cdf_b = _empirical_cdfs(a, b)

    return float(np.max(np.abs(cdf_a - cdf_b)))


def cramer_distance(a: t.Any, b: t.Any) -> float:
    """Root mean square of `F_a - F_b` over the pooled sample, in `[0, 1]`."""
    cdf_a, cdf_b = _empirical_cdfs(a, b)

    return float(np.sqrt(np.mean((cdf_a - cdf_b) ** 2)))


def _status(model: ModelSpec, d: np.ndarray, floor: float) -> str:
    above = d > floor

    if is_constant_coefficient(model):
        if np.any(above):
            log.warning(f"Constant-coefficient model shows distances above the noise floor {floor:.3g}: {d}")
        return STATUS_EXACT
    if not np.any(above):
        return STATUS_INCONCLUSIVE
    if not np.all(above):
        log.warning(f"{int(np.count_nonzero(~above))} distance(s) at or below the noise floor {floor:.3g}")
        return STATUS_INCONCLUSIVE

    return STATUS_OK


def scaling_experiment(
    model: ModelSpec,
    x0: float,
    t_list: t.Sequence[float],
    variant: str | RegressorChoice = "chi",
    cfg: EulerConfig = DEFAULT_CONFIG,
    synthetic_inject: float | None = None,
    flow: FlowConfig = DEFAULT_FLOW,
) -> ExperimentResult:
    """KS distance between the simulated law and the regression law over descending times, with its log-log slope.

    Params:
        model (ModelSpec): The model.
        x0 (float): Starting point.
        t_list (Sequence[float]): At least three strictly descending times.
        variant (str | RegressorChoice): Regressor variant of the approximating law.
        cfg (EulerConfig): Euler settings, shared by all times.
        synthetic_inject (float | None): When set, skip simulation and use `d(t) = t^p`.
        flow (FlowConfig): Flow solver settings of the regression law.

    Returns:
        (ExperimentResult): Rows per time, the slope with its bootstrap half-width and a status.
            Distances at or below the noise floor `2/sqrt(n)` make the run inconclusive; a
            constant-coefficient model is reported as inconclusive by exactness.

    """
    times = np.asarray(t_list, dtype=float)
    if times.size < MIN_T_POINTS or np.any(np.diff(times) >= 0.0) or np.any(times <= 0.0):
        msg = PreconditionError(f"Need at least {MIN_T_POINTS} positive, strictly descending times, got {list(times)}")
        log.error(msg)

        raise msg

    choice = RegressorChoice.parse(variant)
    floor = noise_floor(cfg.n_paths)
    rate = delta_exponents(model).delta
    if choice.kind in FROZEN_VARIANTS:
        rate = min(rate, model.zeta)
    required = SLOPE_FRACTION * rate

    rows: list[DistanceRow] = []
    if synthetic_inject is not None:
        for t_ in times:
            d = float(t_**synthetic_inject)
            rows.append(DistanceRow(t=float(t_), n_paths=cfg.n_paths, ks=d, cramer=d, variant="synthetic"))
        status = STATUS_OK if np.all(times**synthetic_inject > floor) else STATUS_INCONCLUSIVE
    else:
        for i, t_ in enumerate(times):
            simulated = simulate_paths(model, x0, float(t_), cfg.with_seed(cfg.seed + 2 * i))
            approx = sample_regression(model, x0, float(t_), choice, cfg.n_paths, cfg.seed + 2 * i + 1, flow)
            row = DistanceRow(
                t=float(t_),
                n_paths=cfg.n_paths,
                ks=ks_distance(simulated, approx),
                cramer=cramer_distance(simulated, approx),
                variant=str(choice),
            )
            log.info(f"t={row.t:g}: KS {row.ks:.5f}, Cramer {row.cramer:.5f} (noise floor {floor:.5f})")
            rows.append(row)
        status = _status(model, np.array([row.ks for row in rows]), floor)

    ## KS distances between samples of size n live on the lattice k/n
    d = np.maximum([row.ks for row in rows], 1.0 / max(cfg.n_paths, 1))
    fit = fit_loglog_slope(times, d)
    halfwidth = bootstrap_slope_halfwidth(times, d, n_boot=BOOTSTRAP_DRAWS, seed=cfg.seed)

    result = ExperimentResult(
        rows=rows,
        slope=fit.slope,
        halfwidth=halfwidth,
        noise_floor=floor,
        status=status,
        required_slope=required,
        seed=cfg.seed,
        dt=cfg.dt,
        variant="synthetic" if synthetic_inject is not None else str(choice),
    )
    log.info(f"Slope {fit.slope:.4f} +- {halfwidth:.4f} (required {required:.4f}), status {status}")

    return result


def euler_bias_check(model: ModelSpec, x0: float, t_: float, cfg: EulerConfig = DEFAULT_CONFIG) -> BiasCheck:
    """KS distance between Euler runs at `dt` and `dt / 2`."""
    coarse = simulate_paths(model, x0, t_, cfg)
    fine = simulate_paths(model, x0, t_, cfg.halved())

    check = BiasCheck(dt=cfg.dt, ks=ks_distance(coarse, fine), noise_floor=noise_floor(cfg.n_paths))
    if not check.within_noise:
        log.warning(f"Euler bias at dt={cfg.dt:g} exceeds the noise floor: KS {check.ks:.5f} >= {check.noise_floor:.5f}")

    return check
