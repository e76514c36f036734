"""Characteristic exponent and Fourier inversion of stable laws.

With `phi = exp(Psi)` the density is `g(w) = (1/pi) int_0^inf Re(exp(-i w xi) phi(xi)) dxi`,
using `Psi(-xi) = conj(Psi(xi))`. Derivatives and fractional operators are the same integral
with a Fourier multiplier inserted.
"""

from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.stable.methods")

from levy_toolbox.exc import ExponentConsistencyError, InversionAccuracyError, PreconditionError
from levy_toolbox.model import stable_truncation_integral
from levy_toolbox.utils.quadrature_utils import composite_gauss_legendre, oscillatory_breakpoints

from .classes import DensityKind, InversionSpec, StableParams, stable_constant
from .constants import (
    AFFINE_CHECK_POINTS,
    BLOCK_ELEMENTS,
    CONSISTENCY_TOL,
    DENSITY_KINDS,
    EULER_GAMMA,
    FFT_COLUMN_BLOCK,
    FFT_PADDING,
    GL_ORDER,
    N_HALVINGS,
    NEGATIVE_GATE,
    QUAD_LIMIT,
    TRUNCATION_EXPONENT,
    TRUNCATION_POINTS,
)

import numpy as np
from scipy import fft as sp_fft, integrate, interpolate

DEFAULT_SPEC = InversionSpec()


def symmetric_exponent(alpha: float, xi: t.Any) -> np.ndarray:
    """Exponent of the unit symmetric part `|u|^(-alpha-1) du`: `-c_alpha |xi|^alpha`."""
    return -stable_constant(alpha) * np.abs(np.asarray(xi, dtype=float)) ** alpha


def asymmetric_exponent(alpha: float, xi: t.Any) -> np.ndarray:
    """Exponent of the signed part `sgn(u) |u|^(-alpha-1) du`, truncated compensation at `|u| = 1`.

    Purely imaginary and odd in `xi`.
    """
    xi = np.asarray(xi, dtype=float)
    mod = np.abs(xi)

    if alpha == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            log_mod = np.log(np.where(mod > 0.0, mod, 1.0))
        return 2j * xi * (1.0 - EULER_GAMMA - log_mod)

    skew = 0.5 * stable_constant(alpha) * np.tan(0.5 * np.pi * alpha)

    return 2j * (np.sign(xi) * mod**alpha * skew - xi / (1.0 - alpha))


def exponent_from_parts(
    alpha: float, lam: t.Any, rho: t.Any, upsilon: t.Any, xi: t.Any
) -> np.ndarray:
    """`Psi(xi) = i xi upsilon + lam psi_sym(xi) + lam rho psi_asym(xi)`, broadcasting all arguments."""
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(xi, dtype=float)

    return (
        1j * xi * np.asarray(upsilon, dtype=float)
        + lam * symmetric_exponent(alpha, xi)
        + lam * np.asarray(rho, dtype=float) * asymmetric_exponent(alpha, xi)
    )


def stable_exponent(p: StableParams, xi: t.Any) -> np.ndarray:
    """Characteristic exponent `Psi^(lam, rho, upsilon)(xi)` in closed form.

    Params:
        p (StableParams): The law.
        xi (array-like): Fourier variable(s).

    Returns:
        (np.ndarray): Complex values of the exponent.

    """
    return exponent_from_parts(p.alpha, p.lam, p.rho, p.upsilon, xi)


def _symmetric_integral_quad(alpha: float) -> float:
    ## int_0^inf (1 - cos v) v^(-alpha-1) dv
    near, _ = integrate.quad(
        lambda v: 2.0 * np.sin(0.5 * v) ** 2 * v ** (-alpha - 1.0), 0.0, 1.0, epsabs=1e-14, limit=QUAD_LIMIT
    )
    cos_tail, _ = integrate.quad(lambda v: v ** (-alpha - 1.0), 1.0, np.inf, weight="cos", wvar=1.0)

    return near + 1.0 / alpha - cos_tail


def _signed_integral_quad(alpha: float) -> float:
    ## int_0^1 (sin v - v) v^(-alpha-1) dv + int_1^inf sin(v) v^(-alpha-1) dv
    near, _ = integrate.quad(
        lambda v: (np.sin(v) - v) * v ** (-alpha - 1.0), 0.0, 1.0, epsabs=1e-14, limit=QUAD_LIMIT
    )
    sin_tail, _ = integrate.quad(lambda v: v ** (-alpha - 1.0), 1.0, np.inf, weight="sin", wvar=1.0)

    return near + sin_tail


def stable_exponent_quad(p: StableParams, xi: t.Any) -> np.ndarray:
    """Characteristic exponent from the Levy integral by adaptive quadrature.

    Independent of the closed form; after `v = u|xi|` both parts reduce to one-dimensional
    integrals that do not depend on `xi`.
    """
    xi = np.asarray(xi, dtype=float)
    mod = np.abs(xi)

    sym = _symmetric_integral_quad(p.alpha)
    signed = _signed_integral_quad(p.alpha)

    with np.errstate(divide="ignore", invalid="ignore"):
        powered = mod**p.alpha
        cut = np.where(mod > 0.0, stable_truncation_integral(p.alpha, np.where(mod > 0.0, mod, 1.0)), 0.0)

    real = -2.0 * p.lam * powered * sym
    imag = 2.0 * p.lam * p.rho * np.sign(xi) * powered * (signed + cut)

    return xi * 1j * p.upsilon + real + 1j * imag


def verify_exponent(p: StableParams, points: t.Sequence[float] = AFFINE_CHECK_POINTS) -> float:
    """Compare closed form and quadrature of the exponent at `points`.

    Returns:
        (float): Largest relative discrepancy.

    Raises:
        ExponentConsistencyError: When the discrepancy exceeds the consistency tolerance.

    """
    xi = np.asarray(points, dtype=float)
    closed = stable_exponent(p, xi)
    quad = stable_exponent_quad(p, xi)

    error = float(np.max(np.abs(closed - quad) / np.maximum(1.0, np.abs(closed))))
    if error > CONSISTENCY_TOL:
        msg = ExponentConsistencyError(
            f"Closed-form and quadrature exponents disagree by {error:.3e} for {p}"
        )
        log.error(msg)

        raise msg

    return error


def resolve_xi_max(p: StableParams, spec: InversionSpec = DEFAULT_SPEC) -> float:
    """Fourier truncation with `c_1 xi_max^alpha = 40`, `c_1` read off `Re Psi` at two points."""
    if spec.xi_max is not None:
        return float(spec.xi_max)

    points = np.asarray(TRUNCATION_POINTS)
    rate = float(np.min(-stable_exponent(p, points).real / points**p.alpha))

    return float((TRUNCATION_EXPONENT / rate) ** (1.0 / p.alpha))


def _multiplier(
    kind: str, alpha: float, lam: t.Any, rho: t.Any, xi: np.ndarray
) -> np.ndarray | complex:
    match kind:
        case "density":
            return 1.0
        case "dw":
            return -1j * xi
        case "dww":
            return -(xi**2) + 0j
        case "dlambda":
            return symmetric_exponent(alpha, xi) + np.asarray(rho) * asymmetric_exponent(alpha, xi)
        case "drho":
            return np.asarray(lam) * asymmetric_exponent(alpha, xi)
        case "sym":
            return symmetric_exponent(alpha, xi) + 0j
        case "asym":
            return -asymmetric_exponent(alpha, xi)
        case "cdf":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(xi > 0.0, 1j / np.where(xi > 0.0, xi, 1.0), 0.0)

    raise PreconditionError(f"Unknown density kind '{kind}', expected one of {DENSITY_KINDS}")


def _phase_rate(p: StableParams, xi_hi: float) -> float:
    """Bound on `|d Im Psi / d xi|` over the uniform part of the Fourier range."""
    if p.alpha == 1.0:
        return abs(p.upsilon) + 2.0 * p.lam * abs(p.rho) * (1.0 + EULER_GAMMA + abs(np.log(xi_hi)))

    drift = abs(p.upsilon - 2.0 * p.lam * p.rho / (1.0 - p.alpha))
    skew = p.alpha * p.scale_rate * abs(p.rho * np.tan(0.5 * np.pi * p.alpha))

    return drift + skew * max(1.0, xi_hi ** (p.alpha - 1.0))


def _invert_panels(p: StableParams, w: np.ndarray, kind: str, xi_hi: float) -> np.ndarray:
    flat = w.ravel()
    out = np.empty_like(flat)
    order = np.argsort(np.abs(flat))
    rate = _phase_rate(p, xi_hi)

    start = 0
    while start < flat.size:
        stop = min(flat.size, start + 256)
        w_top = float(np.abs(flat[order[stop - 1]]))
        width = 2.0 * np.pi / (w_top + rate + 1.0)

        xi, weights = composite_gauss_legendre(oscillatory_breakpoints(xi_hi, width, N_HALVINGS), GL_ORDER)
        stop = min(stop, start + max(1, BLOCK_ELEMENTS // xi.size))

        block = order[start:stop]
        transform = np.exp(stable_exponent(p, xi)) * _multiplier(kind, p.alpha, p.lam, p.rho, xi) * weights
        out[block] = (np.exp(-1j * np.outer(flat[block], xi)) @ transform).real / np.pi

        start = stop

    return out.reshape(w.shape)


def _invert_adaptive(p: StableParams, w: np.ndarray, kind: str, xi_hi: float, limit: int) -> np.ndarray:
    def transform(xi: float) -> complex:
        xi_arr = np.asarray([xi])
        value = np.exp(stable_exponent(p, xi_arr)) * _multiplier(kind, p.alpha, p.lam, p.rho, xi_arr)
        return complex(np.ravel(value)[0])

    flat = w.ravel()
    out = np.empty_like(flat)
    for i, wi in enumerate(flat):
        if wi == 0.0:
            value, _ = integrate.quad(lambda xi: transform(xi).real, 0.0, xi_hi, limit=limit, epsabs=1e-13)
        else:
            ## Re(e^{-i w xi} F) = Re F cos(w xi) + Im F sin(w xi)
            cos_part, _ = integrate.quad(
                lambda xi: transform(xi).real, 0.0, xi_hi, weight="cos", wvar=wi, limit=limit
            )
            sin_part, _ = integrate.quad(
                lambda xi: transform(xi).imag, 0.0, xi_hi, weight="sin", wvar=wi, limit=limit
            )
            value = cos_part + sin_part
        out[i] = value / np.pi

    return out.reshape(w.shape)


def _transform_grid_batch(
    alpha: float,
    lam: np.ndarray,
    rho: np.ndarray,
    upsilon: np.ndarray,
    w0: np.ndarray,
    dw: float,
    n: int,
    kind: str,
    xi_needed: float,
) -> np.ndarray:
    """Values on `w0[k] + j dw`, `j < n`, for a batch of laws sharing `alpha`; shape `(batch, n)`."""
    refine = max(1, int(np.ceil(xi_needed * dw / (2.0 * np.pi))))
    dw_fine = dw / refine
    n_fine = n * refine
    n_fft = sp_fft.next_fast_len(FFT_PADDING * n_fine)
    dxi = 2.0 * np.pi / (n_fft * dw_fine)

    xi = np.arange(n_fft) * dxi
    trapezoid = np.ones(n_fft)
    trapezoid[0] = 0.5

    log.debug(f"FFT inversion: {n_fft} nodes, dxi={dxi:.3e}, refinement {refine}, batch {lam.size}")

    out = np.empty((lam.size, n))
    for lo in range(0, lam.size, FFT_COLUMN_BLOCK):
        sl = slice(lo, lo + FFT_COLUMN_BLOCK)
        lam_b, rho_b = lam[sl, None], rho[sl, None]
        psi = exponent_from_parts(alpha, lam_b, rho_b, upsilon[sl, None], xi[None, :])
        series = (
            np.exp(psi)
            * _multiplier(kind, alpha, lam_b, rho_b, xi[None, :])
            * trapezoid
            * np.exp(-1j * w0[sl, None] * xi[None, :])
        )
        out[sl] = sp_fft.fft(series, axis=-1)[:, :n_fine:refine].real * dxi / np.pi

    return out


def stable_transform_grid(
    p: StableParams,
    w0: float,
    dw: float,
    n: int,
    which: DensityKind = "density",
    spec: InversionSpec = DEFAULT_SPEC,
) -> np.ndarray:
    """Density (or a multiplier transform of it) on the uniform grid `w0 + j dw`, `j < n`, by FFT."""
    values = _transform_grid_batch(
        p.alpha,
        np.asarray([p.lam]),
        np.asarray([p.rho]),
        np.asarray([p.upsilon]),
        np.asarray([float(w0)]),
        float(dw),
        int(n),
        which,
        resolve_xi_max(p, spec),
    )[0]

    return _gate(values, which, p)


def transform_grid_columns(
    alpha: float,
    lam: t.Any,
    rho: t.Any,
    upsilon: t.Any,
    w0: t.Any,
    dw: float,
    n: int,
    which: DensityKind = "density",
) -> np.ndarray:
    """Batched `stable_transform_grid` for per-column parameters and grid origins; shape `(batch, n)`."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    rho = np.broadcast_to(np.asarray(rho, dtype=float), lam.shape)
    upsilon = np.broadcast_to(np.asarray(upsilon, dtype=float), lam.shape)
    w0 = np.broadcast_to(np.asarray(w0, dtype=float), lam.shape)

    rate = float(np.min(lam)) * stable_constant(alpha)
    xi_needed = (TRUNCATION_EXPONENT / rate) ** (1.0 / alpha)

    values = _transform_grid_batch(alpha, lam, rho, upsilon, w0, dw, n, which, xi_needed)
    if which == "density":
        _check_gate(values, f"alpha={alpha}, batch of {lam.size} laws")
        values = np.clip(values, 0.0, None)

    return values


def _check_gate(values: np.ndarray, label: str) -> None:
    lowest = float(np.min(values)) if values.size else 0.0
    if lowest < -NEGATIVE_GATE:
        msg = InversionAccuracyError(
            f"Inverted density reaches {lowest:.3e} < -{NEGATIVE_GATE:g} ({label}); "
            "increase xi_max or the number of nodes"
        )
        log.error(msg)

        raise msg


def _gate(values: np.ndarray, kind: str, p: StableParams) -> np.ndarray:
    if kind != "density":
        return values

    _check_gate(values, str(p))

    return np.clip(values, 0.0, None)


def _invert(p: StableParams, w: t.Any, kind: str, spec: InversionSpec) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    xi_hi = resolve_xi_max(p, spec)

    if w.size == 0:
        return np.zeros_like(w)

    match spec.mode:
        case "panels":
            return _invert_panels(p, w, kind, xi_hi)
        case "adaptive":
            return _invert_adaptive(p, w, kind, xi_hi, spec.n_nodes or QUAD_LIMIT)
        case "fft":
            n = spec.n_nodes or 4096
            lo, hi = float(np.min(w)) - 1.0, float(np.max(w)) + 1.0
            dw = (hi - lo) / (n - 1)
            grid = lo + dw * np.arange(n)
            values = _transform_grid_batch(
                p.alpha,
                np.asarray([p.lam]),
                np.asarray([p.rho]),
                np.asarray([p.upsilon]),
                np.asarray([lo]),
                dw,
                n,
                kind,
                xi_hi,
            )[0]
            return interpolate.CubicSpline(grid, values)(w)

    raise PreconditionError(f"Unknown inversion mode '{spec.mode}'")


def stable_density(p: StableParams, w: t.Any, spec: InversionSpec = DEFAULT_SPEC) -> np.ndarray:
    """Density `g^(lam, rho, upsilon)(w)` by Fourier inversion, vectorised over `w`.

    Raises:
        InversionAccuracyError: If a value falls below `-1e-9` before clamping.

    """
    return _gate(_invert(p, w, "density", spec), "density", p)


def stable_density_derivs(
    p: StableParams,
    w: t.Any,
    which: t.Literal["dw", "dww", "dlambda", "drho"],
    spec: InversionSpec = DEFAULT_SPEC,
) -> np.ndarray:
    """Derivative of the density in `w` (first or second), in `lam` or in `rho`."""
    if which not in ("dw", "dww", "dlambda", "drho"):
        raise PreconditionError(f"Unknown derivative '{which}', expected dw, dww, dlambda or drho")

    return _invert(p, w, which, spec)


def stable_operator_density(
    p: StableParams, w: t.Any, kind: t.Literal["sym", "asym"], spec: InversionSpec = DEFAULT_SPEC
) -> np.ndarray:
    """`L^(alpha),sym g` or `L^(alpha),asym g` evaluated on the Fourier side."""
    if kind not in ("sym", "asym"):
        raise PreconditionError(f"Unknown operator kind '{kind}', expected sym or asym")

    return _invert(p, w, kind, spec)


def stable_cdf(p: StableParams, w: t.Any, spec: InversionSpec = DEFAULT_SPEC) -> np.ndarray:
    """Distribution function by the Gil-Pelaez formula `1/2 - (1/pi) int_0^inf Im(e^{-i w xi} phi)/xi dxi`."""
    if spec.mode == "fft":
        spec = InversionSpec(xi_max=spec.xi_max, mode="panels")

    return np.clip(0.5 + _invert(p, w, "cdf", spec), 0.0, 1.0)
