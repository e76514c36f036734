from __future__ import annotations

from levy_toolbox.exc import PreconditionError, QuadratureError, SeriesDivergenceError
from levy_toolbox.parametrix import (
    DensityField,
    FieldFamily,
    Grid,
    SeriesConfig,
    convolve_family,
    envelope_constants,
    gamma_envelope,
    invert_condition_constant,
    phi_alpha,
    phi_components,
    phi_drift,
    phi_nu,
    phi_total,
    pointwise_diagnostics_enabled,
    product_weights,
    residual_field,
    resolution_floor,
    resolvent_psi,
    time_space_convolve,
    transition_density,
    zero_order_field,
)

import numpy as np
import pytest

UNIT = Grid(0.0, 1.0, 16)


def _constant_family(value: float, m: int = 4, t: float = 0.5) -> FieldFamily:
    fields = [DensityField(grid=UNIT, t=k * t / m, values=np.full((16, 16), value)) for k in range(1, m + 1)]
    return FieldFamily(t=t, fields=fields)


def test_grid_geometry():
    grid = Grid.centred(1.0, 1.0, 1.0, 64)

    assert (grid.x_min, grid.x_max) == (-49.0, 51.0)
    assert grid.centre == pytest.approx(1.0)
    assert grid.weights.sum() == pytest.approx(100.0)
    assert grid.interior().sum() == pytest.approx(32, abs=2)

    with pytest.raises(PreconditionError):
        Grid(0.0, 1.0, 8)
    with pytest.raises(PreconditionError):
        Grid(1.0, 1.0, 32)


def test_resolution_floor():
    assert resolution_floor(Grid(0.0, 1.0, 101), 1.5) == pytest.approx(0.02**1.5)


def test_density_field_checks_and_lookup():
    values = np.add.outer(np.arange(16.0), np.arange(16.0))
    field = DensityField(grid=UNIT, t=0.1, values=values)

    points = UNIT.points
    assert field(points[3], points[5]) == pytest.approx(8.0)
    assert field(points[3], 3.0) < field(points[3], 1.0)
    assert field.row_integrals().shape == (16,)
    assert list(field.to_frame().columns) == ["t", "x", "y", "value"]

    with pytest.raises(PreconditionError):
        DensityField(grid=UNIT, t=0.1, values=np.zeros((16, 15)))
    with pytest.raises(QuadratureError):
        DensityField(grid=UNIT, t=0.1, values=np.full((16, 16), np.nan))


def test_field_family_times():
    family = _constant_family(1.0)

    np.testing.assert_allclose(family.times, [0.125, 0.25, 0.375, 0.5])
    assert family[4] is family.final

    with pytest.raises(IndexError):
        family[0]
    with pytest.raises(PreconditionError):
        family + _constant_family(1.0, m=3)
    with pytest.raises(PreconditionError):
        FieldFamily(t=0.5, fields=[])


def test_convolution_of_constant_families():
    ## unit grid weights sum to one, so (a * b)_t = t a b
    out = time_space_convolve(_constant_family(2.0), _constant_family(3.0))

    np.testing.assert_allclose(out.values, 0.5 * 6.0)
    assert out.t == pytest.approx(0.5)

    family = convolve_family(_constant_family(2.0), _constant_family(3.0))
    np.testing.assert_allclose([f.values[0, 0] for f in family.fields], 6.0 * family.times)


def test_convolution_uses_staggered_times():
    m, t = 4, 0.5
    step = t / m
    left = FieldFamily(
        t=t, fields=[DensityField(grid=UNIT, t=k * step, values=np.full((16, 16), k * step)) for k in range(1, m + 1)]
    )

    out = time_space_convolve(left, _constant_family(1.0))

    ## step * sum_a (a step): int_0^t (t - s) ds evaluated at the right end of every cell
    np.testing.assert_allclose(out.values, t**2 * (m + 1) / (2 * m))


def _power_family(value: float, d: float, m: int = 4, t: float = 0.5) -> FieldFamily:
    fields = [
        DensityField(grid=UNIT, t=k * t / m, values=np.full((16, 16), value * (k * t / m) ** (d - 1.0)))
        for k in range(1, m + 1)
    ]
    return FieldFamily(t=t, fields=fields, singularity=d)


def test_product_weights():
    np.testing.assert_allclose(product_weights(4, 0.125), 0.125)

    ## weights against s^(d - 1) sampled at the right cell ends integrate it exactly
    weights = product_weights(8, 0.0625, right=0.5)
    s = 0.0625 * np.arange(1, 9)
    assert float(np.sum(weights * s**-0.5)) == pytest.approx(2.0 * np.sqrt(0.5), rel=1e-12)


def test_convolution_integrates_singular_powers():
    ## int_0^t (t - s)^(-1/2) s^(-1/2) ds = B(1/2, 1/2) = pi
    out = time_space_convolve(_power_family(2.0, 0.5), _power_family(3.0, 0.5))
    np.testing.assert_allclose(out.values, 6.0 * np.pi, rtol=1e-10)

    ## int_0^t (t - s)^(-1/2) ds = 2 sqrt(t)
    out = time_space_convolve(_power_family(2.0, 0.5), _constant_family(3.0))
    np.testing.assert_allclose(out.values, 6.0 * 2.0 * np.sqrt(0.5), rtol=1e-10)

    family = convolve_family(_power_family(1.0, 0.4), _power_family(1.0, 0.4))
    assert family.singularity == pytest.approx(0.8)
    assert (family + _power_family(1.0, 0.4)).singularity == pytest.approx(0.4)

    with pytest.raises(PreconditionError):
        _power_family(1.0, 0.0)


def test_convolution_requires_matching_families():
    with pytest.raises(PreconditionError):
        time_space_convolve(_constant_family(1.0, m=4), _constant_family(1.0, m=2))


def test_gamma_envelope():
    assert gamma_envelope(1.0, 0.5, 1.0, 1) == pytest.approx(1.0)

    norms = [gamma_envelope(0.3, 0.4, 2.0, k) for k in (1, 2, 3)]
    np.testing.assert_allclose(envelope_constants(norms, 0.3, 0.4), 2.0)


def test_pointwise_diagnostics_switch(point_mass_model, density_nu_model, smooth_model):
    assert not pointwise_diagnostics_enabled(point_mass_model)
    assert pointwise_diagnostics_enabled(density_nu_model)
    assert pointwise_diagnostics_enabled(smooth_model)


def test_invert_condition_constant(smooth_model, point_mass_model):
    grid = Grid(-5.0, 5.0, 201)

    assert invert_condition_constant(smooth_model, 0.1, grid) == 0.0

    value = invert_condition_constant(point_mass_model, 0.1, grid)
    assert np.isfinite(value) and value > 0.0


def test_cauchy_zero_order_field(cauchy_model):
    grid = Grid(-6.0, 6.0, 128)
    field, _ = zero_order_field(cauchy_model, 0.2, grid)

    x, y = np.meshgrid(grid.points, grid.points, indexing="ij")
    exact = 1.0 / (np.pi * 0.2 * (1.0 + ((y - x) / 0.2) ** 2))

    np.testing.assert_allclose(field.values, exact, atol=1e-3)


def test_phi_vanishes_for_constant_coefficients(constant_skewed_model):
    phi = phi_total(constant_skewed_model, 0.2, Grid(-6.0, 6.0, 128))

    assert phi.diagnostics["phi_l1"] < 1e-10
    assert phi.diagnostics["nu_l1"] == 0.0


def test_grid_phi_matches_pointwise(smooth_model):
    grid = Grid(-4.0, 4.0, 128)
    parts = phi_components(smooth_model, 0.2, grid)
    j = 70
    y = float(grid.points[j])
    rows = grid.interior()
    x = grid.points[rows]

    drift = phi_drift(smooth_model, 0.2, x, y)
    alpha = phi_alpha(smooth_model, 0.2, x, y)

    np.testing.assert_allclose(parts.drift.values[rows, j], drift, atol=1e-3 * np.max(np.abs(drift)))
    np.testing.assert_allclose(parts.alpha.values[rows, j], alpha, atol=1e-3 * np.max(np.abs(alpha)))
    np.testing.assert_array_equal(phi_nu(smooth_model, 0.2, x, y), 0.0)


def test_transition_density_of_constant_model(constant_skewed_model):
    grid = Grid(-6.0, 6.0, 128)
    p = transition_density(constant_skewed_model, 0.2, grid, SeriesConfig(K=2, n_time_nodes=2))

    assert p.diagnostics["r_l1"] < 1e-8
    assert p.diagnostics["R_sup"] < 1e-3
    assert "invert_C" not in p.diagnostics
    assert "p_upper_C" in p.diagnostics

    residual = residual_field(p, constant_skewed_model)
    assert residual.name == "R"
    assert float(np.max(np.abs(residual.values[grid.interior()]))) == pytest.approx(p.diagnostics["R_sup"])


def test_transition_density_of_smooth_model(smooth_model):
    grid = Grid(-6.0, 6.0, 256)
    p = transition_density(smooth_model, 0.2, grid, SeriesConfig(K=2, n_time_nodes=4))
    diag = p.diagnostics

    assert 0.6 <= diag["row_integral_min"] <= diag["row_integral_max"] <= 1.1
    assert np.isfinite(diag["series.envelope_C"])
    assert np.isfinite(diag["R_l1"])
    assert diag["series.norm_k1"] > 0.0


def test_series_divergence_can_fail_hard(smooth_model):
    cfg = SeriesConfig(K=2, n_time_nodes=2, growth_tolerance=0.0, fail_on_divergence=True)

    with pytest.raises(SeriesDivergenceError):
        resolvent_psi(smooth_model, 0.2, Grid(-6.0, 6.0, 128), cfg)


def test_series_config_validation():
    with pytest.raises(PreconditionError):
        SeriesConfig(K=0)
    with pytest.raises(PreconditionError):
        SeriesConfig(n_time_nodes=0)


@pytest.mark.slow
def test_density_residual_envelopes_are_stable_under_refinement(density_nu_model):
    t_ = 0.4
    cfg = SeriesConfig(K=3, n_time_nodes=4)
    coarse, fine = (
        transition_density(density_nu_model, t_, Grid(-6.0, 6.0, n), cfg).diagnostics for n in (128, 256)
    )

    for key in ("R_point_C", "p_upper_C"):
        a, b = coarse[key], fine[key]
        assert np.isfinite(a) and np.isfinite(b) and a > 0.0 and b > 0.0, key
        assert max(a / b, b / a) < 2.0, key

    delta = fine["series.delta"]
    C = fine["series.envelope_C"]
    assert not fine["series.series_diverging"]
    for k in (1, 2, 3):
        assert np.isfinite(fine[f"series.envelope_C_k{k}"])
        assert fine[f"series.norm_k{k}"] <= gamma_envelope(t_, delta, C, k) * (1.0 + 1e-9)
