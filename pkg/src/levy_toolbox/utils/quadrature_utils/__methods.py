"""Fixed quadrature rules shared by the stable, flow and Levy-measure integrals.

All rules return `(nodes, weights)` pairs so callers can evaluate integrands on whole
arrays at once and reduce with a dot product.
"""

from __future__ import annotations

from functools import lru_cache
import logging

log = logging.getLogger("levy_toolbox.utils.quadrature_utils")

import numpy as np


@lru_cache(maxsize=32)
def _legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)

    return nodes, weights


def composite_gauss_legendre(
    breakpoints: np.ndarray, order: int = 16
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule over consecutive breakpoints.

    Params:
        breakpoints (np.ndarray): Increasing panel edges.
        order (int): Number of nodes per panel.

    Returns:
        (tuple[np.ndarray, np.ndarray]): Flattened nodes and weights.

    """
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError(f"Need at least two breakpoints, got shape {edges.shape}")

    ref_nodes, ref_weights = _legendre_rule(order)
    lo = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]

    nodes = lo + half * (ref_nodes[None, :] + 1.0)
    weights = half * ref_weights[None, :]

    return nodes.ravel(), weights.ravel()


def geometric_breakpoints(top: float, n_halvings: int = 60) -> np.ndarray:
    """Panel edges `0, top*2^-n, ..., top/2, top` graded toward zero."""
    return np.concatenate(([0.0], top * np.exp2(-np.arange(n_halvings, -1, -1.0))))


def oscillatory_breakpoints(
    upper: float, width: float, n_halvings: int = 60
) -> np.ndarray:
    """Panel edges on `[0, upper]`: geometric toward zero, then panels no wider than `width`.

    Params:
        upper (float): Right end of the integration range.
        width (float): Largest allowed panel width (one oscillation period of the kernel).
        n_halvings (int): Number of geometric refinements below the first panel.

    Returns:
        (np.ndarray): Increasing breakpoints starting at 0 and ending at `upper`.

    """
    first = min(width, upper)
    head = geometric_breakpoints(first, n_halvings)
    if upper <= first:
        return head

    n_uniform = int(np.ceil((upper - first) / width))
    tail = np.linspace(first, upper, n_uniform + 1)[1:]

    return np.concatenate((head, tail))


def power_law_nodes(
    lo: float, hi: float, order: int = 16, panels_per_decade: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes for integrands behaving like powers of `u` on `(lo, hi]`, `hi` possibly infinite.

    Finite ranges use log-spaced panels. An infinite upper end is mapped by `u = 1/v` beyond
    `max(lo, 1)` and the `v`-range is graded toward zero, so tails like `u^-gamma-1` with small
    `gamma` keep full accuracy.

    Returns:
        (tuple[np.ndarray, np.ndarray]): Nodes in `u` and matching weights.

    """
    if hi <= lo:
        return np.empty(0), np.empty(0)
    if lo <= 0.0:
        raise ValueError(f"Lower end must be positive, got {lo}")

    parts_u: list[np.ndarray] = []
    parts_w: list[np.ndarray] = []

    finite_hi = hi if np.isfinite(hi) else max(lo, 1.0)
    if finite_hi > lo:
        decades = np.log10(finite_hi / lo)
        n_panels = max(1, int(np.ceil(decades * panels_per_decade)))
        edges = np.geomspace(lo, finite_hi, n_panels + 1)
        u, w = composite_gauss_legendre(edges, order)
        parts_u.append(u)
        parts_w.append(w)

    if not np.isfinite(hi):
        ## u = 1/v on (0, 1/finite_hi], du = dv / v^2
        v, wv = composite_gauss_legendre(geometric_breakpoints(1.0 / finite_hi, 50), order)
        keep = v > 0.0
        v, wv = v[keep], wv[keep]
        parts_u.append(1.0 / v)
        parts_w.append(wv / v**2)

    return np.concatenate(parts_u), np.concatenate(parts_w)


def simpson_weights(n_intervals: int) -> np.ndarray:
    """Composite Simpson weights for `n_intervals + 1` unit-spaced nodes (`n_intervals` even)."""
    if n_intervals < 2 or n_intervals % 2:
        raise ValueError(f"Simpson's rule needs an even number of intervals, got {n_intervals}")

    weights = np.ones(n_intervals + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0

    return weights / 3.0


def graded_mesh(
    t: float, n_intervals: int, grading: float, reverse: bool = False
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Graded time mesh on `[0, t]` from a uniform mesh in `v`.

    With `reverse=False` the mesh is `s = t*v^grading` (refined near `s=0`), with `reverse=True`
    it is `s = t - t*(1-v)^grading` (refined near `s=t`).

    Returns:
        (tuple[np.ndarray, np.ndarray, np.ndarray]): `v` nodes, `s` nodes and `ds/dv`.

    """
    v = np.linspace(0.0, 1.0, n_intervals + 1)

    if reverse:
        w = 1.0 - v
        s = t - t * w**grading
        ds_dv = t * grading * w ** (grading - 1.0)
        s[-1] = t
    else:
        s = t * v**grading
        ds_dv = t * grading * v ** (grading - 1.0)
        s[-1] = t

    return v, s, ds_dv
