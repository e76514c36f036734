from __future__ import annotations

from levy_toolbox.exc import InversionAccuracyError, PreconditionError
from levy_toolbox.stable import (
    InversionSpec,
    StableParams,
    affine_correction,
    frac_op,
    kernel_G_alpha,
    sample_stable,
    sample_stable_batch,
    stable_cdf,
    stable_constant,
    stable_density,
    stable_density_derivs,
    stable_exponent,
    stable_exponent_quad,
    stable_operator_density,
    stable_transform_grid,
    symmetric_exponent,
    transform_grid_columns,
    verify_exponent,
)
from levy_toolbox.utils.quadrature_utils import composite_gauss_legendre

import numpy as np
import pytest

CAUCHY = StableParams(alpha=1.0, lam=1.0 / np.pi)
SKEWED = StableParams(alpha=1.5, lam=1.0, rho=0.5, upsilon=0.2)


def _cauchy_density(w):
    return 1.0 / (np.pi * (1.0 + w**2))


def _ks_against(sample, cdf_values):
    n = sample.size
    upper = np.arange(1, n + 1) / n - cdf_values
    lower = cdf_values - np.arange(n) / n

    return float(max(upper.max(), lower.max()))


def _mass_defect(p, half_width=40.0, n_panels=400):
    w, weights = composite_gauss_legendre(np.linspace(-half_width, half_width, n_panels + 1), 16)
    inner = weights @ stable_density(p, w)
    lo, hi = stable_cdf(p, np.array([-half_width, half_width]))

    return abs(inner + lo + (1.0 - hi) - 1.0)


def test_stable_constant():
    assert stable_constant(1.0) == pytest.approx(np.pi)
    assert symmetric_exponent(1.0, 2.0) == pytest.approx(-2.0 * np.pi)


def test_params_validation():
    with pytest.raises(PreconditionError):
        StableParams(alpha=2.0, lam=1.0)
    with pytest.raises(PreconditionError):
        StableParams(alpha=1.2, lam=0.0)
    with pytest.raises(PreconditionError):
        StableParams(alpha=1.2, lam=1.0, rho=1.2)
    with pytest.raises(PreconditionError):
        InversionSpec(mode="laplace")
    with pytest.raises(PreconditionError):
        InversionSpec(xi_max=-1.0)


@pytest.mark.parametrize(
    "p",
    [
        CAUCHY,
        SKEWED,
        StableParams(alpha=0.6, lam=2.0, rho=-0.7),
        StableParams(alpha=1.0, lam=0.8, rho=0.4, upsilon=-1.0),
        StableParams(alpha=1.9, lam=0.5, rho=0.9),
    ],
)
def test_closed_form_exponent_matches_levy_integral(p):
    assert verify_exponent(p) <= 1e-8

    xi = np.array([-3.0, -0.5, 0.7, 2.5])
    np.testing.assert_allclose(stable_exponent_quad(p, xi), stable_exponent(p, xi), rtol=1e-8, atol=1e-10)


def test_exponent_is_hermitian():
    xi = np.array([0.3, 1.0, 4.0])

    np.testing.assert_allclose(stable_exponent(SKEWED, -xi), np.conj(stable_exponent(SKEWED, xi)))


def test_cauchy_density_closed_form():
    w = np.linspace(-20.0, 20.0, 50)

    np.testing.assert_allclose(stable_density(CAUCHY, w), _cauchy_density(w), rtol=0.0, atol=1e-8)


@pytest.mark.parametrize(
    "spec, tol",
    [(InversionSpec(mode="adaptive"), 1e-7), (InversionSpec(mode="fft", n_nodes=4096), 1e-4)],
)
def test_cauchy_density_other_modes(spec, tol):
    w = np.array([-5.0, -1.0, 0.0, 0.5, 3.0])

    np.testing.assert_allclose(stable_density(CAUCHY, w, spec), _cauchy_density(w), rtol=0.0, atol=tol)


def test_cauchy_cdf_closed_form():
    w = np.array([-30.0, -2.0, -0.25, 0.0, 1.0, 10.0])

    np.testing.assert_allclose(stable_cdf(CAUCHY, w), 0.5 + np.arctan(w) / np.pi, atol=1e-8)


## shifts up to |upsilon| = 10 are the supported range
@pytest.mark.parametrize("upsilon", [0.2, -10.0, 10.0])
def test_density_and_cdf_agree_on_mass(upsilon):
    assert _mass_defect(SKEWED.shifted(upsilon)) < 1e-7


def test_empty_evaluation():
    assert stable_density(SKEWED, np.empty(0)).shape == (0,)


def test_shift_translates_density():
    w = np.linspace(-3.0, 3.0, 13)

    np.testing.assert_allclose(
        stable_density(SKEWED.shifted(1.2), w + 1.0), stable_density(SKEWED.shifted(0.2), w), atol=1e-9
    )


def test_truncated_inversion_trips_negative_gate():
    with pytest.raises(InversionAccuracyError):
        stable_density(CAUCHY, np.linspace(5.0, 15.0, 41), InversionSpec(xi_max=0.5))


def test_derivatives_match_finite_differences():
    w = np.array([-2.0, -0.3, 0.0, 0.8, 2.5])
    h = 1e-4

    d_w = (stable_density(SKEWED, w + h) - stable_density(SKEWED, w - h)) / (2.0 * h)
    np.testing.assert_allclose(stable_density_derivs(SKEWED, w, "dw"), d_w, atol=1e-6)

    hh = 1e-3
    d_ww = (
        stable_density(SKEWED, w + hh) - 2.0 * stable_density(SKEWED, w) + stable_density(SKEWED, w - hh)
    ) / hh**2
    np.testing.assert_allclose(stable_density_derivs(SKEWED, w, "dww"), d_ww, atol=1e-5)

    up = StableParams(SKEWED.alpha, SKEWED.lam + h, SKEWED.rho, SKEWED.upsilon)
    down = StableParams(SKEWED.alpha, SKEWED.lam - h, SKEWED.rho, SKEWED.upsilon)
    d_lam = (stable_density(up, w) - stable_density(down, w)) / (2.0 * h)
    np.testing.assert_allclose(stable_density_derivs(SKEWED, w, "dlambda"), d_lam, atol=1e-6)

    up = StableParams(SKEWED.alpha, SKEWED.lam, SKEWED.rho + h, SKEWED.upsilon)
    down = StableParams(SKEWED.alpha, SKEWED.lam, SKEWED.rho - h, SKEWED.upsilon)
    d_rho = (stable_density(up, w) - stable_density(down, w)) / (2.0 * h)
    np.testing.assert_allclose(stable_density_derivs(SKEWED, w, "drho"), d_rho, atol=1e-6)


def test_unknown_derivative_kind():
    with pytest.raises(PreconditionError):
        stable_density_derivs(SKEWED, 0.0, "dxi")
    with pytest.raises(PreconditionError):
        stable_operator_density(SKEWED, 0.0, "full")


def test_lambda_derivative_splits_into_operators():
    w = np.linspace(-4.0, 4.0, 9)

    combined = stable_operator_density(SKEWED, w, "sym") - SKEWED.rho * stable_operator_density(SKEWED, w, "asym")

    np.testing.assert_allclose(stable_density_derivs(SKEWED, w, "dlambda"), combined, atol=1e-10)


@pytest.mark.parametrize("kind", ["sym", "asym"])
def test_real_space_operator_matches_fourier_side(kind):
    x = np.array([-1.5, 0.0, 0.4, 2.0])

    def d1(z):
        return -2.0 * z / (np.pi * (1.0 + z**2) ** 2)

    def d2(z):
        return (6.0 * z**2 - 2.0) / (np.pi * (1.0 + z**2) ** 3)

    real_space = frac_op(_cauchy_density, x, kind, 1.0, df=d1, d2f=d2)

    np.testing.assert_allclose(real_space, stable_operator_density(CAUCHY, x, kind), atol=2e-6)


def test_frac_op_needs_derivatives():
    with pytest.raises(PreconditionError):
        frac_op(np.sin, 0.0, "sym", 1.2)
    with pytest.raises(PreconditionError):
        frac_op(np.sin, 0.0, "asym", 1.2)


def test_transform_grid_matches_pointwise_inversion():
    p = StableParams(alpha=1.5, lam=1.0)
    grid = -10.0 + 0.05 * np.arange(401)

    np.testing.assert_allclose(stable_transform_grid(p, -10.0, 0.05, 401), stable_density(p, grid), atol=1e-4)


def test_transform_grid_columns_match_single_laws():
    lam = np.array([1.0, 2.0])
    rho = np.array([0.3, -0.2])
    batch = transform_grid_columns(1.5, lam, rho, 0.0, np.array([-6.0, -4.0]), 0.05, 200)

    first = stable_transform_grid(StableParams(1.5, 1.0, 0.3), -6.0, 0.05, 200)
    second = stable_transform_grid(StableParams(1.5, 2.0, -0.2), -4.0, 0.05, 200)

    np.testing.assert_allclose(batch[0], first, atol=1e-10)
    np.testing.assert_allclose(batch[1], second, atol=1e-10)


def test_kernel_G_alpha():
    np.testing.assert_allclose(kernel_G_alpha(np.array([2.0, 0.5, 0.0, -2.0]), 1.0), [0.25, 1.0, 1.0, 0.25])

    with pytest.raises(PreconditionError):
        kernel_G_alpha(1.0, 0.0)


def test_affine_correction_for_cauchy():
    affine = affine_correction(CAUCHY)

    assert affine.sigma == pytest.approx(1.0)
    assert affine.location == pytest.approx(0.0, abs=1e-12)
    assert affine.max_error <= 1e-8


def test_sampler_is_deterministic():
    first = sample_stable(SKEWED, 10, seed=5)

    np.testing.assert_array_equal(first, sample_stable(SKEWED, 10, seed=5))
    assert not np.array_equal(first, sample_stable(SKEWED, 10, seed=6))
    assert sample_stable(SKEWED, 0, seed=5).shape == (0,)

    with pytest.raises(PreconditionError):
        sample_stable(SKEWED, -1, seed=5)


@pytest.mark.parametrize("p", [CAUCHY, SKEWED, StableParams(alpha=0.7, lam=1.0, rho=-0.4)])
def test_sampler_matches_cdf(p):
    n = 20_000
    sample = np.sort(sample_stable(p, n, seed=2024))

    assert _ks_against(sample, stable_cdf(p, sample)) < 1.63 / np.sqrt(n)


def test_batch_sampler_broadcasts():
    rng = np.random.default_rng(0)
    out = sample_stable_batch(1.2, np.full((3, 4), 1.0), 0.2, np.zeros(4), rng)

    assert out.shape == (3, 4)
    assert np.all(np.isfinite(out))
    assert sample_stable_batch(1.2, np.empty(0), 0.0, 0.0, rng).shape == (0,)


@pytest.mark.slow
def test_lattice_density_mass(stable_lattice):
    for entry in stable_lattice:
        p = StableParams(alpha=entry["alpha"], lam=entry["lam"], rho=entry["rho"])

        assert _mass_defect(p) < 1e-6, p
