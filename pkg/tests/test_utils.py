from __future__ import annotations

import os

from levy_toolbox.utils.env_utils import resolve_workers
from levy_toolbox.utils.fit_utils import (
    FittedConstant,
    bootstrap_slope_halfwidth,
    fit_constant,
    fit_loglog_slope,
    fit_stable_constant,
)
from levy_toolbox.utils.io_utils import write_csv, write_report
from levy_toolbox.utils.quadrature_utils import (
    composite_gauss_legendre,
    graded_mesh,
    power_law_nodes,
    simpson_weights,
)

import numpy as np
import pandas as pd
import pytest
from scipy import integrate


def test_resolve_workers_caps_at_cpu_count():
    cpus = os.cpu_count() or 1

    assert resolve_workers(None) == cpus
    assert resolve_workers(0) == cpus
    assert resolve_workers(1) == 1
    assert resolve_workers(10**6) == cpus


def test_gauss_legendre_is_exact_for_polynomials():
    nodes, weights = composite_gauss_legendre(np.array([0.0, 0.5, 2.0]), order=4)

    assert weights @ nodes**5 == pytest.approx(2.0**6 / 6.0, rel=1e-13)


def test_gauss_legendre_rejects_single_breakpoint():
    with pytest.raises(ValueError):
        composite_gauss_legendre(np.array([1.0]))


def test_power_law_nodes_integrate_heavy_tail():
    u, w = power_law_nodes(0.1, np.inf)

    ## int_0.1^inf u^-3 du = 50
    assert w @ u**-3.0 == pytest.approx(50.0, rel=1e-10)


def test_power_law_nodes_empty_range():
    u, w = power_law_nodes(2.0, 1.0)

    assert u.size == 0 and w.size == 0


def test_simpson_weights():
    np.testing.assert_allclose(simpson_weights(4), np.array([1, 4, 2, 4, 1]) / 3.0)

    with pytest.raises(ValueError):
        simpson_weights(3)


@pytest.mark.parametrize("reverse", [False, True])
def test_graded_mesh_covers_interval(reverse):
    v, s, ds_dv = graded_mesh(0.3, 8, 2.0, reverse=reverse)

    assert s[0] == pytest.approx(0.0, abs=1e-15)
    assert s[-1] == 0.3
    assert np.all(np.diff(s) > 0.0)
    ## ds/dv is linear in v for grading 2
    assert integrate.trapezoid(ds_dv, v) == pytest.approx(0.3, rel=1e-12)


def test_loglog_slope_of_power_law_is_exact():
    t_values = [0.4, 0.2, 0.1, 0.05]
    d_values = [3.0 * t**0.3 for t in t_values]

    fit = fit_loglog_slope(t_values, d_values)

    assert fit.slope == pytest.approx(0.3, abs=1e-12)
    assert np.exp(fit.intercept) == pytest.approx(3.0, rel=1e-12)
    assert bootstrap_slope_halfwidth(t_values, d_values) == 0.0


def test_bootstrap_halfwidth_is_seeded():
    t_values = [0.4, 0.2, 0.1, 0.05, 0.025]
    d_values = [0.11, 0.09, 0.05, 0.045, 0.02]

    first = bootstrap_slope_halfwidth(t_values, d_values, seed=3)
    second = bootstrap_slope_halfwidth(t_values, d_values, seed=3)

    assert first == second
    assert first > 0.0


def test_fit_constant_ignores_floor_and_zero_kernel():
    lhs = np.array([1.0, -4.0, 1e-20, 5.0])
    rhs = np.array([1.0, 2.0, 1e-30, 0.0])

    assert fit_constant(lhs, rhs, floor=1e-15) == 2.0
    assert fit_constant(np.zeros(3), np.ones(3)) == 0.0


def test_fit_stable_constant_records_seed():
    def ratio_sample(rng, n):
        x = rng.uniform(0.0, 1.0, n)
        return 2.0 * x, x

    fitted = fit_stable_constant(ratio_sample, 100, seed=11)

    assert fitted.value == pytest.approx(2.0)
    assert fitted.value_doubled == pytest.approx(2.0)
    assert fitted.seed == 11
    assert fitted.stable


def test_fitted_constant_drift():
    assert not FittedConstant(value=1.0, value_doubled=3.0).stable
    assert FittedConstant(value=1.0, value_doubled=1.5).stable
    assert not FittedConstant(value=float("inf")).stable


def test_write_csv_is_reproducible(tmp_path):
    frame = pd.DataFrame({"t": [0.1, 0.05], "ks": [1.0 / 3.0, 0.25]})

    first = write_csv(frame, tmp_path / "a" / "out.csv").read_text()
    second = write_csv(frame, tmp_path / "b" / "out.csv").read_text()

    assert first == second
    assert first.splitlines()[0] == "t,ks"
    assert "3.333333333333e-01" in first


def test_write_report_layout(tmp_path):
    path = write_report({"passed": True, "slope": 0.25}, tmp_path / "report.txt", metadata={"seed": 7})

    lines = path.read_text().splitlines()

    assert lines[0] == "[metadata]"
    assert "seed = 7" in lines
    assert "[diagnostics]" in lines
    assert "passed = true" in lines
    assert "slope = 0.25" in lines
