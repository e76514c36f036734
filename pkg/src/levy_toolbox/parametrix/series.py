"""Time-space convolution, the resolvent series and the corrected transition density.

`(f * g)_t(x, y) = int_0^t int f_{t-s}(x, z) g_s(z, y) dz ds`. Families live on the times
`k t / m`; on each time cell the left factor is taken at the cell's largest remaining time and
the right factor at the cell's right end, so neither factor is ever evaluated at time zero
where both may be singular. Cell weights integrate the small-time powers `s^(-1 + d)` of the
factors exactly.
"""

from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.parametrix.series")

from levy_toolbox.exc import PreconditionError, SeriesDivergenceError
from levy_toolbox.flows import solve_chi
from levy_toolbox.kernels import G_abg, KernelParams, residual_bound_params
from levy_toolbox.model import DensityResidual, ModelSpec, PointMassResidual, delta_exponents
from levy_toolbox.regression import principal_grid
from levy_toolbox.stable import kernel_G_alpha

from .__methods import invert_condition_constant, phi_total, zero_order_field
from .classes import DensityField, FieldFamily, Grid, SeriesConfig
from .constants import COVERAGE_TOL, EDGE_FRACTION, RESOLUTION_CELLS, TAIL_TERMS

import numpy as np
from scipy import special

DEFAULT_SERIES = SeriesConfig()


def resolution_floor(grid: Grid, alpha: float) -> float:
    """Smallest evaluation time of a family: `t^(1/alpha)` equal to two grid spacings."""
    return float((RESOLUTION_CELLS * grid.h) ** alpha)


def boundary_mass(field: DensityField) -> float:
    """Largest share of a row's `|f|`-mass sitting in the outer band of the `y` grid (interior rows)."""
    n = field.grid.n_points
    band = max(1, int(EDGE_FRACTION * n))
    rows = np.abs(field.values[field.grid.interior()])

    edge = rows[:, :band].sum(axis=1) + rows[:, -band:].sum(axis=1)
    total = rows.sum(axis=1)

    with np.errstate(invalid="ignore", divide="ignore"):
        share = np.where(total > 0.0, edge / total, 0.0)

    return float(np.max(share)) if share.size else 0.0


def product_weights(j: int, step: float, left: float = 1.0, right: float = 1.0) -> np.ndarray:
    """Time weights of the cells `[(i-1) step, i step]`, `i = 1..j`, of `int_0^T f_{T-s} g_s ds`, `T = j step`.

    The factors are taken at `T - (i-1) step` and `i step` and assumed to behave like
    `(T-s)^(left-1)` and `s^(right-1)` inside the cell; these powers are integrated exactly with
    the incomplete beta function. Bounded factors (`left = right = 1`) give the weights `step`.
    """
    T = j * step
    i = np.arange(1, j + 1)

    cumulative = special.betainc(right, left, np.arange(j + 1) / j)
    mass = T ** (left + right - 1.0) * special.beta(right, left) * np.diff(cumulative)

    return mass * ((j - i + 1) * step) ** (1.0 - left) * (i * step) ** (1.0 - right)


def _convolve_at(f: FieldFamily, g: FieldFamily, j: int) -> np.ndarray:
    weights = f.grid.weights
    cells = product_weights(j, f.step, f.singularity, g.singularity)
    out = np.zeros_like(f[1].values)
    ## cell i pairs f at time (j + 1 - i) t/m with g at time i t/m
    for i in range(1, j + 1):
        out += cells[i - 1] * ((f[j + 1 - i].values * weights[None, :]) @ g[i].values)

    return out


def _check_compatible(f: FieldFamily, g: FieldFamily) -> None:
    if f.m != g.m or not np.isclose(f.t, g.t) or f.grid != g.grid:
        raise PreconditionError(f"Families differ in time grid or space grid ({f.m} vs {g.m} times, t={f.t} vs {g.t})")


def time_space_convolve(f: FieldFamily, g: FieldFamily, j: int | None = None) -> DensityField:
    """`(f * g)` at time `j t / m` (the final time by default).

    Logs a warning when a factor carries more than `1e-3` of its mass near the grid edge.
    """
    _check_compatible(f, g)
    j = f.m if j is None else j

    for family, label in ((f, "left"), (g, "right")):
        share = boundary_mass(family[j])
        if share > COVERAGE_TOL:
            log.warning(f"Grid coverage: {label} factor keeps {share:.2e} of its mass at the grid edge")

    values = _convolve_at(f, g, j)

    return DensityField(grid=f.grid, t=j * f.step, values=values, tail_exponent=f[j].tail_exponent, name="conv")


def convolve_family(f: FieldFamily, g: FieldFamily) -> FieldFamily:
    """`(f * g)` at every time of the family."""
    _check_compatible(f, g)
    fields = [
        DensityField(grid=f.grid, t=j * f.step, values=_convolve_at(f, g, j), tail_exponent=f[j].tail_exponent)
        for j in range(1, f.m + 1)
    ]

    return FieldFamily(t=f.t, fields=fields, singularity=f.singularity + g.singularity)


def _base_families(
    model: ModelSpec, t_: float, grid: Grid, cfg: SeriesConfig
) -> tuple[FieldFamily, FieldFamily]:
    """`p^0` and `Phi` families on the time grid, with evaluation times clamped to the resolution floor."""
    m = cfg.n_time_nodes
    floor = resolution_floor(grid, model.alpha)
    times = t_ * np.arange(1, m + 1) / m

    clamped = int(np.count_nonzero(times < floor))
    if clamped:
        log.info(f"{clamped} of {m} family times below the resolution floor {floor:.3g} are evaluated at the floor")

    p0_fields, phi_fields = [], []
    for s in times:
        s_eval = float(max(s, floor))
        p0, columns = zero_order_field(model, s_eval, grid, cfg.flow)
        phi = phi_total(model, s_eval, grid, cfg.flow, columns)
        p0_fields.append(p0)
        phi_fields.append(phi)

    return FieldFamily(t=t_, fields=p0_fields), FieldFamily(
        t=t_, fields=phi_fields, singularity=delta_exponents(model).delta
    )


def gamma_envelope(t_: float, delta: float, C: float, k: int) -> float:
    """`t^(-1 + k delta) C^k Gamma(delta)^k / Gamma(k delta)`."""
    return float(t_ ** (-1.0 + k * delta) * (C * special.gamma(delta)) ** k / special.gamma(k * delta))


def envelope_constants(norms: t.Sequence[float], t_: float, delta: float) -> list[float]:
    """Per-term constants `C_k` solving `norm_k = gamma_envelope(t, delta, C_k, k)`."""
    constants = []
    for k, norm in enumerate(norms, start=1):
        scale = gamma_envelope(t_, delta, 1.0, k)
        constants.append(float((norm / scale) ** (1.0 / k)))

    return constants


def _series_report(
    norms: list[float], t_: float, delta: float, cfg: SeriesConfig
) -> dict[str, t.Any]:
    constants = envelope_constants(norms, t_, delta)
    C = max(constants)

    report: dict[str, t.Any] = {f"norm_k{k}": norm for k, norm in enumerate(norms, start=1)}
    report.update({f"envelope_C_k{k}": c for k, c in enumerate(constants, start=1)})
    report["envelope_C"] = C
    report["delta"] = delta

    diverging = False
    for k in range(1, len(constants)):
        previous, current = constants[k - 1], constants[k]
        if previous > 0.0 and current / previous > cfg.growth_tolerance:
            diverging = True
            log.warning(
                f"Resolvent term {k + 1} outgrows the Gamma envelope: C_{k + 1}/C_{k} = {current / previous:.3g}"
            )
    report["series_diverging"] = diverging

    if cfg.tail_bound_report:
        report["tail_bound"] = sum(
            gamma_envelope(t_, delta, C, k) for k in range(cfg.K + 1, cfg.K + 1 + TAIL_TERMS)
        )

    if diverging and cfg.fail_on_divergence:
        msg = SeriesDivergenceError(
            f"Resolvent series at t={t_:g} grows beyond the Gamma-factorial envelope: constants {constants}"
        )
        log.error(msg)

        raise msg

    return report


def _resolvent(
    model: ModelSpec, t_: float, grid: Grid, cfg: SeriesConfig
) -> tuple[FieldFamily, FieldFamily, dict[str, t.Any]]:
    p0_family, phi_family = _base_families(model, t_, grid, cfg)
    rows = grid.interior()

    term = phi_family
    psi = phi_family
    norms = [term.final.l1_norm(rows)]
    for k in range(2, cfg.K + 1):
        term = convolve_family(term, phi_family)
        psi = psi + term
        norms.append(term.final.l1_norm(rows))
        log.debug(f"Phi^(*{k}) at t={t_:g}: sup_x int |.| dy = {norms[-1]:.4g}")

    report = _series_report(norms, t_, delta_exponents(model).delta, cfg)

    return p0_family, psi, report


def resolvent_psi(
    model: ModelSpec, t_: float, grid: Grid, cfg: SeriesConfig = DEFAULT_SERIES
) -> DensityField:
    """`Psi_t = sum_{k <= K} Phi^(*k)_t` on the grid.

    Diagnostics hold the per-term norms `sup_x int |Phi^(*k)_t| dy`, the fitted constants of the
    envelope `t^(-1 + k delta) C^k Gamma(delta)^k / Gamma(k delta)` and the envelope bound on the
    dropped terms.

    Raises:
        SeriesDivergenceError: With `fail_on_divergence`, when consecutive envelope constants grow
            by more than `growth_tolerance`.

    """
    _, psi, report = _resolvent(model, t_, grid, cfg)
    field = psi.final
    field.name = "psi"
    field.diagnostics = report

    return field


def pointwise_diagnostics_enabled(model: ModelSpec) -> bool:
    """Point masses with `alpha <= 1` leave `p_t(x, .)` unbounded, so only integral checks apply."""
    return not (isinstance(model.nu, PointMassResidual) and model.alpha <= 1.0)


def _envelope_fits(
    model: ModelSpec, t_: float, grid: Grid, p: np.ndarray, residual: np.ndarray, chi: np.ndarray
) -> dict[str, float]:
    rows = grid.interior()
    y = grid.points[None, :]
    centre = chi[:, None]
    tau = model.tau(t_)
    d = delta_exponents(model).delta

    gamma_prime = model.alpha
    fits: dict[str, float] = {}
    if isinstance(model.nu, DensityResidual):
        primes = residual_bound_params(model)
        gamma_prime = primes.gamma_prime
        first = t_**d * G_abg(KernelParams(model.alpha, model.alpha, model.alpha, t_), centre, y)
        second = t_**primes.delta_prime * G_abg(
            KernelParams(model.alpha, primes.beta_prime, primes.gamma_prime, t_), centre, y
        )
        fits["R_point_C"] = float(np.max(np.abs(residual[rows]) / (first + second)[rows]))

    distance = np.abs(y - centre)
    with np.errstate(divide="ignore"):
        far = np.where(distance > 1.0, t_ * distance ** (-gamma_prime - 1.0), 0.0)
    upper = kernel_G_alpha(distance / tau, model.alpha) / tau + far
    fits["p_upper_C"] = float(np.max(np.clip(p[rows], 0.0, None) / upper[rows]))

    return fits


def transition_density(
    model: ModelSpec, t_: float, grid: Grid, cfg: SeriesConfig = DEFAULT_SERIES
) -> DensityField:
    """`p_t = p^0_t + (p^0 * Psi)_t` on the grid.

    Diagnostics (interior rows): `r_l1 = sup_x int |p^0 * Psi| dy`, the residual
    `R_t = p_t - p^main_t` in `L^1`-in-`y` and sup norm, row integrals, the minimum value, the
    series report and, where they apply, the pointwise envelope constants.
    """
    p0_family, psi, report = _resolvent(model, t_, grid, cfg)

    p0_final, _ = zero_order_field(model, t_, grid, cfg.flow)
    correction = time_space_convolve(p0_family, psi)
    p = p0_final + correction
    p.name = "p"

    main = principal_grid(model, grid.points, t_, grid.x_min, grid.h, grid.n_points, cfg.flow)
    residual = p.values - main
    rows = grid.interior()
    row_integrals = p.row_integrals()[rows]

    diagnostics: dict[str, t.Any] = {
        "r_l1": correction.l1_norm(rows),
        "R_l1": p.with_values(residual).l1_norm(rows),
        "R_sup": float(np.max(np.abs(residual[rows]))),
        "row_integral_min": float(np.min(row_integrals)),
        "row_integral_max": float(np.max(row_integrals)),
        "min_value": float(np.min(p.values)),
        "boundary_mass": boundary_mass(p),
        "pointwise_diagnostics": pointwise_diagnostics_enabled(model),
    }
    diagnostics.update({f"series.{key}": value for key, value in report.items()})

    if model.nu is not None:
        diagnostics["invert_C"] = invert_condition_constant(model, t_, grid)

    if diagnostics["pointwise_diagnostics"]:
        chi = solve_chi(model, grid.points, t_, cfg.flow).endpoint
        diagnostics.update(_envelope_fits(model, t_, grid, p.values, residual, chi))

    p.diagnostics = diagnostics
    log.info(
        f"Transition density at t={t_:g}: R_l1={diagnostics['R_l1']:.4g}, r_l1={diagnostics['r_l1']:.4g}, "
        f"row integrals in [{diagnostics['row_integral_min']:.4f}, {diagnostics['row_integral_max']:.4f}]"
    )

    return p


def residual_field(p: DensityField, model: ModelSpec, cfg: SeriesConfig = DEFAULT_SERIES) -> DensityField:
    """`R_t = p_t - p^main_t` on the grid of `p`."""
    grid = p.grid
    main = principal_grid(model, grid.points, p.t, grid.x_min, grid.h, grid.n_points, cfg.flow)

    return p.with_values(p.values - main, name="R")
