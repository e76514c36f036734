from __future__ import annotations

from levy_toolbox.exc import PreconditionError
from levy_toolbox.kernels import (
    F_abg,
    G_abg,
    KernelParams,
    N_beta,
    kernel_integral,
    kernel_property_report,
    residual_bound_params,
    self_convolution_G,
    subconvolution,
)

import numpy as np
import pytest


def test_three_branches():
    kp = KernelParams(alpha=1.0, beta=0.5, gamma=1.0, t=1.0)

    np.testing.assert_allclose(G_abg(kp, 0.0, np.array([0.5, 2.0, -2.0])), [1.0, 0.25, 0.25])

    short = KernelParams(alpha=1.0, beta=0.5, gamma=2.0, t=0.04)
    ## inner plateau t^-1/alpha, middle branch t^(beta/alpha) r^(-beta-1), tail r^(-gamma-1)
    np.testing.assert_allclose(
        G_abg(short, 1.0, np.array([1.01, 1.25, 3.0])), [25.0, 0.2 * 0.25**-1.5, 0.2 * 2.0**-3.0]
    )


@pytest.mark.parametrize("t", [0.01, 0.3, 2.0])
def test_rescaled_kernel_matches(t):
    kp = KernelParams(alpha=1.3, beta=0.4, gamma=0.9, t=t)
    rng = np.random.default_rng(1)
    x = rng.normal(size=50)
    y = x + rng.choice([-1.0, 1.0], 50) * 10.0 ** rng.uniform(-3.0, 2.0, 50)

    np.testing.assert_allclose(G_abg(kp, x, y), F_abg(kp, (y - x) / kp.tau), rtol=1e-12)


def test_kernel_params_validation():
    with pytest.raises(PreconditionError):
        KernelParams(alpha=1.0, beta=0.0, gamma=1.0, t=0.1)
    with pytest.raises(PreconditionError):
        KernelParams(alpha=1.0, beta=0.5, gamma=1.0, t=0.0)


def test_N_beta():
    assert N_beta(1.0, np.exp(-1.0)) == pytest.approx(2.0)
    assert N_beta(0.5, 0.25) == pytest.approx(1.0)
    assert N_beta(1.5, 0.25) == pytest.approx(4.0)


def test_residual_bound_params(density_nu_model, smooth_model):
    params = residual_bound_params(density_nu_model)

    assert params.beta_prime == pytest.approx(0.5)
    assert params.gamma_prime == pytest.approx(1.5)
    assert params.delta_prime == pytest.approx(1.0 / 1.5)

    with pytest.raises(PreconditionError):
        residual_bound_params(smooth_model)


@pytest.mark.parametrize("t", [0.1, 0.5])
def test_kernel_integral(t):
    alpha, beta, gamma = 1.5, 0.5, 1.0
    decay = t ** (beta / alpha)
    expected = 2.0 * (1.0 + (1.0 - decay) / beta + decay / gamma)

    assert kernel_integral(KernelParams(alpha, beta, gamma, t)) == pytest.approx(expected, rel=1e-6)


def test_self_convolution_at_origin():
    ## 2 (int_0^1 dz + int_1^inf z^-4 dz)
    assert self_convolution_G(1.0, 0.0) == pytest.approx(8.0 / 3.0, rel=1e-6)


def test_self_convolution_is_dominated_by_kernel():
    from levy_toolbox.stable import kernel_G_alpha

    x = np.array([0.5, 3.0, 30.0])
    values = np.array([self_convolution_G(1.2, float(xi)) for xi in x])

    assert np.all(values / kernel_G_alpha(x, 1.2) < 20.0)


def test_subconvolution():
    kp = KernelParams(alpha=1.2, beta=0.6, gamma=1.2, t=0.2)

    value = subconvolution(kp, 0.1, 0.0, 0.5)
    assert np.isfinite(value) and value > 0.0
    assert value / float(G_abg(kp, 0.0, 0.5)) < 100.0

    with pytest.raises(PreconditionError):
        subconvolution(kp, 0.2, 0.0, 0.5)


def test_property_report():
    report = kernel_property_report(1.2, 0.6, 1.2, n_samples=200, seed=3, n_subconv=8)

    comp = report.constants["G_comp"]
    assert comp.value <= 1.0 + 1e-12
    assert comp.seed == 3
    assert comp.n_samples == 200
    assert report.constants["H0"].n_samples == 8
    assert set(report.constants) == {
        "G_comp",
        "G_pol",
        "vague",
        "G_mult",
        "vagueF",
        "F_mult",
        "sub_conv_simple",
        "H0",
    }
    assert len(report.integral_bounds) == 7

    entries = report.as_dict()
    assert entries["G_comp.seed"] == 3
    assert "bint.t=0.01" in entries
    assert entries["all_stable"] == report.passed


def test_property_report_needs_ordered_indices():
    with pytest.raises(PreconditionError):
        kernel_property_report(1.0, 1.2, 1.0, n_samples=10)
