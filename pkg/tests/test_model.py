from __future__ import annotations

import json

from levy_toolbox.exc import ConfigurationError, ExpressionError, ModelSpecError
from levy_toolbox.model import (
    Atom,
    Expression,
    ModelSpec,
    PointMassResidual,
    SampleGrid,
    compensated_drift,
    delta_exponents,
    drift_compensation_gap,
    dump_model,
    holder_quotient,
    is_constant_coefficient,
    load_model,
    model_from_mapping,
    model_to_mapping,
    partial_compensator,
    partially_compensated_drift,
    presets,
    residual_moment,
    sde_model,
    stable_truncation_integral,
    validate_model,
)

import numpy as np
import pytest


def test_expression_evaluates_and_broadcasts():
    expr = Expression("x^2 + 1")

    np.testing.assert_allclose(expr(np.array([0.0, 2.0])), [1.0, 5.0])
    assert expr.symbols == frozenset({"x"})
    assert not expr.is_constant

    kernel = Expression("min(abs(u)^(-1.5), abs(u)^(-3))")
    value = kernel(np.zeros((3, 1)), np.array([0.25, 2.0]))

    assert value.shape == (3, 2)
    np.testing.assert_allclose(value[0], [8.0, 0.125])


def test_constant_expression():
    expr = Expression("1/pi")

    assert expr.is_constant
    np.testing.assert_allclose(expr(np.zeros(4)), np.full(4, 1.0 / np.pi))
    assert Expression(0.5)(1.0) == 0.5


@pytest.mark.parametrize(
    "source",
    ["sin(x", "y + 1", "x.real", "__import__('os')", "log(x)", "'a'", "max(x)"],
)
def test_expression_rejects_outside_grammar(source):
    with pytest.raises(ExpressionError):
        expr = Expression(source)
        expr(1.0)


def test_expression_error_is_a_configuration_error():
    assert issubclass(ExpressionError, ConfigurationError)


@pytest.mark.parametrize(
    "overrides",
    [
        {"alpha": 2.5},
        {"alpha": 0.8, "eta": 0.1},
        {"zeta": 1.5},
        {"beta_activity": 0.0},
        {"lambda_min": 2.0, "lambda_max": 1.0},
        {"horizon_T": 0.0},
    ],
)
def test_model_invariants(overrides):
    kwargs = dict(
        alpha=1.2,
        lambda_fn=Expression(1),
        rho_fn=Expression(0),
        b_fn=Expression(0),
        eta=1.0,
        zeta=0.5,
        beta_activity=0.5,
    )
    kwargs.update(overrides)

    with pytest.raises(ModelSpecError):
        ModelSpec(**kwargs)


def test_model_coefficients(smooth_model):
    x = np.array([0.0, np.pi / 2])

    np.testing.assert_allclose(smooth_model.lam(x), [1.0, 1.3])
    np.testing.assert_allclose(smooth_model.rho(x), [0.5, 0.0], atol=1e-15)
    np.testing.assert_allclose(smooth_model.upsilon(x), [1.0, 0.0], atol=1e-15)
    assert smooth_model.tau(0.5**1.2) == pytest.approx(0.5)


def test_stable_truncation_integral():
    assert stable_truncation_integral(1.5, 0.25) == pytest.approx(2.0)
    assert stable_truncation_integral(1.0, np.exp(-2.0)) == pytest.approx(2.0)
    assert stable_truncation_integral(0.5, 4.0) == pytest.approx(-2.0)
    ## continuous through alpha = 1
    assert stable_truncation_integral(1.0 + 1e-9, 0.1) == pytest.approx(np.log(10.0), rel=1e-6)


def test_residual_moment_point_mass(point_mass_model):
    x = np.array([0.5, 2.0, 0.0])

    np.testing.assert_allclose(residual_moment(point_mass_model, x, 0.0, 1.0, power=1), [-0.5, 0.0, 0.0])
    np.testing.assert_allclose(residual_moment(point_mass_model, x, 1.0, np.inf, power=0), [0.0, 1.0, 0.0])


def test_residual_moment_density(density_nu_model):
    x = np.array([-1.0, 0.0, 3.0])

    ## q_nu(u) = |u|^-3 beyond |u| = 1, two tails of mass 1/2
    np.testing.assert_allclose(residual_moment(density_nu_model, x, 1.0, np.inf, power=0), 1.0, rtol=1e-10)
    ## symmetric kernel
    np.testing.assert_allclose(residual_moment(density_nu_model, x, 0.1, 1.0, power=1), 0.0, atol=1e-12)


def test_compensated_drift_small_alpha():
    model = presets.constant_model(alpha=0.8, lam=1.0, rho=0.5, b=0.0)

    ## -2 lambda rho / (1 - alpha)
    np.testing.assert_allclose(compensated_drift(model, np.zeros(3)), -5.0)


def test_compensated_drift_is_drift_for_alpha_above_one(smooth_model):
    x = np.linspace(-2.0, 2.0, 9)

    np.testing.assert_allclose(compensated_drift(smooth_model, x), np.sin(x))


def test_partial_compensator(constant_skewed_model):
    ## t^(1/alpha) = 0.25 at t = 0.125, I(0.25) = 2, upsilon = 0.6
    np.testing.assert_allclose(partial_compensator(constant_skewed_model, 0.125, [0.0, 1.0]), 1.2)
    np.testing.assert_allclose(partial_compensator(constant_skewed_model, 1.0, [0.0, 1.0]), 0.0)
    ## b_t = b - m_t with b = 0.5
    np.testing.assert_allclose(partially_compensated_drift(constant_skewed_model, 0.125, [0.0, 1.0]), -0.7)
    np.testing.assert_allclose(partially_compensated_drift(constant_skewed_model, 1.0, [0.0, 1.0]), 0.5)


def test_drift_compensation_gap_scale(constant_skewed_model):
    gap, scale = drift_compensation_gap(constant_skewed_model, 0.125, np.zeros(2))

    np.testing.assert_allclose(gap, 1.2)
    assert scale > 0.0


def test_delta_exponents(smooth_model):
    delta = delta_exponents(smooth_model)

    assert delta.delta_eta == pytest.approx(1.0)
    assert delta.delta_zeta == pytest.approx(1.0 / 1.2)
    assert delta.delta_beta == pytest.approx(1.1 / 1.2)
    assert delta.delta == pytest.approx(0.9 / 1.2)
    assert delta.delta_infty is None
    assert delta_exponents(smooth_model, delta_nu=0.5).delta_infty == 0.5


def test_is_constant_coefficient(cauchy_model, smooth_model, point_mass_model):
    assert is_constant_coefficient(cauchy_model)
    assert not is_constant_coefficient(smooth_model)
    assert not is_constant_coefficient(point_mass_model)


def test_holder_quotient():
    x = np.linspace(-1.0, 1.0, 21)

    assert holder_quotient(x, 3.0 * x, 1.0) == pytest.approx(3.0)
    assert holder_quotient(np.array([0.0, 5.0]), np.array([0.0, 1.0]), 1.0) == 0.0


def test_sde_model_intensity():
    model = sde_model(
        1.5,
        1.0,
        0.2,
        b_fn=lambda x: -x,
        sigma_fn=lambda x: 2.0 + np.sin(x),
        sigma_bounds=(1.0, 3.0),
        eta=1.0,
        zeta=0.5,
        beta_activity=0.5,
    )

    assert model.lam(0.0) == pytest.approx(2.0**1.5)
    np.testing.assert_allclose(model.rho(np.zeros(3)), 0.2)
    assert model.lambda_max == pytest.approx(3.0**1.5)
    assert model.nu is None


@pytest.mark.parametrize(
    "factory",
    [
        presets.smooth_test_model,
        presets.constant_cauchy_model,
        presets.point_mass_example,
        presets.density_nu_example,
        presets.translation_invariant_example,
    ],
)
def test_presets_pass_validation(factory):
    report = validate_model(factory(), SampleGrid(n_points=101))

    assert report.passed, report.failed()


def test_validation_reports_bound_and_range_failures():
    model = ModelSpec(
        alpha=1.2,
        lambda_fn=Expression("1 + 0.5*sin(x)"),
        rho_fn=Expression(1.5),
        b_fn=Expression(0),
        lambda_min=0.8,
        lambda_max=1.5,
        name="broken",
    )

    report = validate_model(model, SampleGrid(n_points=101))

    assert not report.passed
    assert not report.get("H^(alpha)(ii)").passed
    assert not report.get("rho_range").passed
    assert report.get("H^(alpha)(i).lambda").passed
    assert report.as_dict()["all_passed"] is False


def test_validation_flags_negative_point_mass():
    model = ModelSpec(
        alpha=1.2,
        lambda_fn=Expression(1),
        rho_fn=Expression(0),
        b_fn=Expression(0),
        nu=PointMassResidual(atoms=(Atom(position_fn=Expression(0.5), weight_fn=Expression(-1)),)),
        beta_activity=0.1,
    )

    report = validate_model(model, SampleGrid(n_points=41))

    assert not report.get("nu_minus_domination").passed
    with pytest.raises(KeyError):
        report.get("H^nu(ii).density_bound")


@pytest.mark.parametrize(
    "name",
    ["smooth_test", "constant_cauchy", "point_mass", "density_nu", "translation_invariant"],
)
def test_shipped_model_files_load(configs_dir, name):
    model = load_model(configs_dir / "models" / f"{name}.json")

    assert validate_model(model, SampleGrid(n_points=41)).passed


def test_model_mapping_matches_file(configs_dir):
    path = configs_dir / "models" / "density_nu.json"

    assert model_to_mapping(load_model(path)) == model_to_mapping(presets.density_nu_example())
    assert json.loads(path.read_text())["nu"]["type"] == "density"


def test_dump_model_writes_loadable_json(tmp_path, point_mass_model):
    path = dump_model(point_mass_model, tmp_path / "models" / "pm.json")

    assert model_to_mapping(load_model(path)) == model_to_mapping(point_mass_model)


@pytest.mark.parametrize(
    "mapping",
    [
        {"alpha": 1.2, "lambda": 1, "rho": 0},
        {"alpha": 1.2, "lambda": 1, "rho": 0, "b": 0, "gamma": 3},
        {"alpha": 2.2, "lambda": 1, "rho": 0, "b": 0},
        {"alpha": 1.2, "lambda": "1 +", "rho": 0, "b": 0},
        {"alpha": 1.2, "lambda": 1, "rho": 0, "b": 0, "nu": {"type": "levy"}},
        {"alpha": 1.2, "lambda": 1, "rho": 0, "b": 0, "nu": {"type": "point_masses", "atoms": []}},
        {"alpha": 1.2, "lambda": 1, "rho": 0, "b": 0, "nu": {"type": "density", "q_nu": "u"}},
    ],
)
def test_model_from_mapping_rejects(mapping):
    with pytest.raises(ConfigurationError):
        model_from_mapping(mapping)


def test_load_model_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_model(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_model(bad)

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigurationError):
        load_model(listing)
