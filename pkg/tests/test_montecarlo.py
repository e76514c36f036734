from __future__ import annotations

from dataclasses import replace
import math

from levy_toolbox.exc import PathExplosionError, PreconditionError
from levy_toolbox.model import Atom, DensityResidual, Expression, PointMassResidual, delta_exponents
from levy_toolbox.montecarlo import (
    BiasCheck,
    DistanceRow,
    EulerConfig,
    ExperimentResult,
    cramer_distance,
    euler_bias_check,
    ks_distance,
    noise_floor,
    sample_regression,
    sample_residual_jumps,
    scaling_experiment,
    simulate_paths,
)
from levy_toolbox.montecarlo.constants import STATUS_EXACT, STATUS_INCONCLUSIVE, STATUS_OK

import numpy as np
import pytest
from scipy import stats


def test_noise_floor():
    assert noise_floor(10_000) == pytest.approx(0.02)
    assert noise_floor(0) == math.inf


def test_euler_config():
    cfg = EulerConfig(dt=1e-3)

    assert cfg.n_steps(1.0) == 1000
    assert cfg.n_steps(0.016) == 16
    assert cfg.halved().dt == pytest.approx(5e-4)
    assert cfg.with_seed(9).seed == 9

    with pytest.raises(PreconditionError):
        cfg.n_steps(0.01)
    with pytest.raises(PreconditionError):
        cfg.n_steps(0.0)
    with pytest.raises(PreconditionError):
        EulerConfig(dt=0.0)
    with pytest.raises(PreconditionError):
        EulerConfig(jump_cut=1.5)
    with pytest.raises(PreconditionError):
        EulerConfig(n_paths=-1)


def test_distances():
    a = np.array([0.3, 1.0, 2.0, 5.0])

    assert ks_distance(a, a) == 0.0
    assert cramer_distance(a, a) == 0.0
    assert ks_distance(a, a + 10.0) == 1.0
    assert 0.0 < cramer_distance(a, a + 10.0) <= 1.0
    assert ks_distance([0.0, 1.0], [0.5]) == pytest.approx(0.5)

    with pytest.raises(PreconditionError):
        ks_distance([], a)
    with pytest.raises(PreconditionError):
        cramer_distance(a, np.empty(0))


def test_simulation_is_seeded_and_worker_independent(smooth_model):
    cfg = EulerConfig(dt=0.1 / 16, n_paths=1000, seed=5, chunk_size=256)

    serial = simulate_paths(smooth_model, 0.3, 0.1, cfg)
    threaded = simulate_paths(smooth_model, 0.3, 0.1, replace(cfg, workers=3))
    other = simulate_paths(smooth_model, 0.3, 0.1, cfg.with_seed(6))

    assert serial.shape == (1000,)
    np.testing.assert_array_equal(serial, threaded)
    assert not np.array_equal(serial, other)


def test_simulation_edge_cases(smooth_model):
    assert simulate_paths(smooth_model, 0.0, 0.1, EulerConfig(dt=0.1 / 16, n_paths=0)).size == 0

    with pytest.raises(PreconditionError):
        simulate_paths(smooth_model, 0.0, 0.01, EulerConfig(dt=0.1, n_paths=10))


def test_cauchy_euler_law_is_exact(cauchy_model):
    ## a sum of Cauchy increments is Cauchy, so the scheme has no bias
    n = 20_000
    t_ = 0.4
    paths = simulate_paths(cauchy_model, 0.0, t_, EulerConfig(dt=t_ / 16, n_paths=n, seed=3))

    statistic = stats.kstest(paths, stats.cauchy(scale=t_).cdf).statistic
    assert statistic < 1.95 / math.sqrt(n)


def test_point_mass_simulation(point_mass_model):
    cfg = EulerConfig(dt=0.5 / 32, n_paths=2000, seed=1)
    paths = simulate_paths(point_mass_model, 2.0, 0.5, cfg)

    assert np.all(np.isfinite(paths))
    ## jumps to the origin at unit rate pull the law towards 0
    assert np.median(np.abs(paths)) < 2.0

    negative = replace(
        point_mass_model,
        nu=PointMassResidual(atoms=(Atom(position_fn=Expression("-x"), weight_fn=Expression(-1)),)),
    )
    with pytest.raises(PreconditionError):
        simulate_paths(negative, 2.0, 0.5, cfg)


def test_density_residual_simulation(density_nu_model):
    paths = simulate_paths(density_nu_model, 0.0, 0.2, EulerConfig(dt=0.2 / 16, n_paths=500, seed=2))

    assert paths.shape == (500,)
    assert np.all(np.isfinite(paths))


def _density_nu_tail_cdf(a: np.ndarray, cut: float = 0.1) -> np.ndarray:
    ## |u| under min(|u|^-1.5, |u|^-3) restricted to |u| > cut
    inner = 2.0 * (cut**-0.5 - 1.0)
    total = inner + 0.5
    below_one = 2.0 * (cut**-0.5 - np.minimum(a, 1.0) ** -0.5)
    above_one = 0.5 * (1.0 - np.maximum(a, 1.0) ** -2.0)

    return np.clip((below_one + above_one) / total, 0.0, 1.0)


def test_residual_jumps_follow_the_tail_law(density_nu_model):
    n = 20_000
    u = sample_residual_jumps(density_nu_model, 0.0, n, jump_cut=0.1, seed=3)

    assert u.shape == (n,)
    assert np.unique(u).size == n
    assert np.min(np.abs(u)) > 0.1
    assert abs(np.mean(u > 0.0) - 0.5) < 0.02
    assert stats.kstest(np.abs(u), _density_nu_tail_cdf).statistic < 1.95 / math.sqrt(n)


def test_residual_jumps_need_a_density(smooth_model, density_nu_model):
    with pytest.raises(PreconditionError):
        sample_residual_jumps(smooth_model, 0.0, 10)
    with pytest.raises(PreconditionError):
        sample_residual_jumps(density_nu_model, 0.0, -1)

    assert sample_residual_jumps(density_nu_model, 0.0, 0).size == 0


def test_thinning_bound_violation_raises(density_nu_model):
    ## q_nu grows in x, so the envelope fitted around x0 = 0 fails once the drift carries paths away
    model = replace(
        density_nu_model,
        b_fn=Expression(100),
        nu=DensityResidual(q_nu=Expression("(1 + x^2)*abs(u)^(-3)"), beta=2.0, gamma=2.0),
    )

    with pytest.raises(PreconditionError, match="thinning bound"):
        simulate_paths(model, 0.0, 1.0, EulerConfig(dt=1.0 / 16, n_paths=50, jump_cut=1.0))


def test_explosion_names_the_step(smooth_model):
    model = replace(smooth_model, b_fn=Expression("x^3"), drift_bounded=False)

    with pytest.raises(PathExplosionError) as err:
        simulate_paths(model, 10.0, 1.0, EulerConfig(dt=1.0 / 16, n_paths=4))

    assert 1 <= err.value.step <= 16


def test_sample_regression(cauchy_model):
    assert sample_regression(cauchy_model, 0.0, 0.1, count=0).size == 0

    draws = sample_regression(cauchy_model, 0.0, 0.1, "chi", count=100, seed=4)
    np.testing.assert_array_equal(draws, sample_regression(cauchy_model, 0.0, 0.1, "chi", count=100, seed=4))

    with pytest.raises(PreconditionError):
        sample_regression(cauchy_model, 0.0, 0.1, count=-1)


def test_synthetic_scaling_recovers_exponent(smooth_model):
    result = scaling_experiment(smooth_model, 0.0, [0.1, 0.05, 0.025, 0.0125], synthetic_inject=0.3)

    assert result.slope == pytest.approx(0.3, rel=1e-12)
    assert result.halfwidth == pytest.approx(0.0, abs=1e-9)
    assert result.status == STATUS_OK
    assert result.variant == "synthetic"
    assert result.required_slope == pytest.approx(0.5 * delta_exponents(smooth_model).delta)

    frame = result.to_frame()
    assert list(frame.columns) == ["t", "n_paths", "ks", "cramer", "variant", "slope"]
    assert len(frame) == 4


def test_scaling_rejects_bad_times(smooth_model):
    with pytest.raises(PreconditionError):
        scaling_experiment(smooth_model, 0.0, [0.1, 0.05], synthetic_inject=0.3)
    with pytest.raises(PreconditionError):
        scaling_experiment(smooth_model, 0.0, [0.1, 0.2, 0.05], synthetic_inject=0.3)
    with pytest.raises(PreconditionError):
        scaling_experiment(smooth_model, 0.0, [0.1, 0.0, -0.1], synthetic_inject=0.3)


def test_constant_model_is_inconclusive_by_exactness(cauchy_model):
    cfg = EulerConfig(dt=0.05 / 16, n_paths=2000, seed=8)
    result = scaling_experiment(cauchy_model, 0.0, [0.2, 0.1, 0.05], "chi", cfg)

    assert result.status == STATUS_EXACT
    assert not result.failed
    assert result.metadata()["status"] == STATUS_EXACT
    assert [row.t for row in result.rows] == [0.2, 0.1, 0.05]


def test_experiment_result_failure_flag():
    rows = [DistanceRow(t=t_, n_paths=10, ks=0.5, cramer=0.1, variant="chi") for t_ in (0.1, 0.05, 0.025)]

    def result(status: str, slope: float) -> ExperimentResult:
        return ExperimentResult(
            rows=rows, slope=slope, halfwidth=0.0, noise_floor=0.1, status=status, required_slope=0.4
        )

    assert result(STATUS_OK, 0.2).failed
    assert not result(STATUS_OK, 0.5).failed
    assert not result(STATUS_INCONCLUSIVE, 0.2).failed
    np.testing.assert_allclose(result(STATUS_OK, 0.5).t_values, [0.1, 0.05, 0.025])


def test_euler_bias_check(cauchy_model):
    check = euler_bias_check(cauchy_model, 0.0, 0.1, EulerConfig(dt=0.1 / 16, n_paths=2000, seed=2))

    assert isinstance(check, BiasCheck)
    assert check.dt == pytest.approx(0.1 / 16)
    assert check.noise_floor == pytest.approx(noise_floor(2000))
    assert 0.0 <= check.ks <= 1.0


def test_frozen_regressors_use_the_weaker_rate(smooth_model):
    model = replace(smooth_model, zeta=0.3)
    times = [0.1, 0.05, 0.025]

    frozen = scaling_experiment(model, 0.0, times, "frozen", synthetic_inject=0.3)
    chi = scaling_experiment(model, 0.0, times, "chi", synthetic_inject=0.3)

    delta = delta_exponents(model).delta
    assert frozen.required_slope == pytest.approx(0.5 * min(delta, 0.3))
    assert chi.required_slope == pytest.approx(0.5 * delta)
