"""Ready-made models used by the tests, the shipped configs and the acceptance runs."""

from __future__ import annotations

import logging

log = logging.getLogger("levy_toolbox.model.presets")

from .classes import Atom, DensityResidual, ModelSpec, PointMassResidual
from .expressions import Expression

import numpy as np


def constant_cauchy_model(horizon_T: float = 1.0) -> ModelSpec:
    """Standard Cauchy process: `alpha=1`, `lambda=1/pi`, `rho=0`, no drift, no residual."""
    lam = 1.0 / np.pi

    return ModelSpec(
        alpha=1.0,
        lambda_fn=Expression("1/pi"),
        rho_fn=Expression(0),
        b_fn=Expression(0),
        eta=1.0,
        zeta=0.5,
        beta_activity=0.5,
        lambda_min=lam,
        lambda_max=lam,
        horizon_T=horizon_T,
        drift_bounded=True,
        name="constant-cauchy",
    )


def constant_model(
    alpha: float, lam: float = 1.0, rho: float = 0.0, b: float = 0.0, horizon_T: float = 1.0
) -> ModelSpec:
    """Constant-coefficient model; its transition law is a single stable law."""
    return ModelSpec(
        alpha=alpha,
        lambda_fn=Expression(lam),
        rho_fn=Expression(rho),
        b_fn=Expression(b),
        eta=1.0,
        zeta=0.5 * alpha,
        beta_activity=0.5 * alpha,
        lambda_min=lam,
        lambda_max=lam,
        horizon_T=horizon_T,
        drift_bounded=True,
        name=f"constant-alpha{alpha:g}",
    )


def smooth_test_model(alpha: float = 1.2, horizon_T: float = 1.0) -> ModelSpec:
    """`b = sin x`, `lambda = 1 + 0.3 sin x`, `rho = 0.5 cos x`, no residual."""
    return ModelSpec(
        alpha=alpha,
        lambda_fn=Expression("1 + 0.3*sin(x)"),
        rho_fn=Expression("0.5*cos(x)"),
        b_fn=Expression("sin(x)"),
        eta=1.0,
        zeta=min(1.0, 0.9 * alpha),
        beta_activity=0.1,
        lambda_min=0.7,
        lambda_max=1.3,
        horizon_T=horizon_T,
        drift_bounded=True,
        name="smooth-test",
    )


def point_mass_example(alpha: float = 0.8, horizon_T: float = 1.0) -> ModelSpec:
    """Symmetric stable noise plus jumps to the origin at unit rate: `nu(x, du) = delta_{-x}(du)`."""
    return ModelSpec(
        alpha=alpha,
        lambda_fn=Expression(1),
        rho_fn=Expression(0),
        b_fn=Expression(0),
        nu=PointMassResidual(atoms=(Atom(position_fn=Expression("-x"), weight_fn=Expression(1)),)),
        eta=1.0,
        zeta=0.5 * alpha,
        beta_activity=0.1,
        lambda_min=1.0,
        lambda_max=1.0,
        horizon_T=horizon_T,
        drift_bounded=True,
        name="point-mass",
    )


def density_nu_example(alpha: float = 1.5, horizon_T: float = 1.0) -> ModelSpec:
    """Smooth coefficients with residual density `|u|^-1.5` near 0 and `|u|^-3` in the tails."""
    return ModelSpec(
        alpha=alpha,
        lambda_fn=Expression("1 + 0.3*sin(x)"),
        rho_fn=Expression("0.5*cos(x)"),
        b_fn=Expression("sin(x)"),
        nu=DensityResidual(q_nu=Expression("min(abs(u)^(-1.5), abs(u)^(-3))"), beta=0.5, gamma=2.0),
        eta=1.0,
        zeta=1.0,
        beta_activity=0.5,
        lambda_min=0.7,
        lambda_max=1.3,
        horizon_T=horizon_T,
        drift_bounded=True,
        name="density-nu",
    )


def translation_invariant_example(alpha: float = 1.5, horizon_T: float = 1.0) -> ModelSpec:
    """State-independent atomic residual `nu(du) = delta_{0.5}(du) + 0.5 delta_{-1.5}(du)`."""
    return ModelSpec(
        alpha=alpha,
        lambda_fn=Expression("1 + 0.2*cos(x)"),
        rho_fn=Expression(0.3),
        b_fn=Expression("cos(x)"),
        nu=PointMassResidual(
            atoms=(
                Atom(position_fn=Expression(0.5), weight_fn=Expression(1)),
                Atom(position_fn=Expression(-1.5), weight_fn=Expression(0.5)),
            )
        ),
        eta=1.0,
        zeta=1.0,
        beta_activity=0.1,
        lambda_min=0.8,
        lambda_max=1.2,
        horizon_T=horizon_T,
        drift_bounded=True,
        name="translation-invariant",
    )


PRESETS = {
    "constant-cauchy": constant_cauchy_model,
    "smooth-test": smooth_test_model,
    "point-mass": point_mass_example,
    "density-nu": density_nu_example,
    "translation-invariant": translation_invariant_example,
}
