from __future__ import annotations

from .__methods import (
    invert_condition_constant,
    phi_alpha,
    phi_components,
    phi_drift,
    phi_nu,
    phi_nu_parts,
    phi_total,
    zero_order_field,
)
from .classes import DensityField, FieldFamily, Grid, PhiComponents, SeriesConfig
from .series import (
    boundary_mass,
    convolve_family,
    envelope_constants,
    gamma_envelope,
    pointwise_diagnostics_enabled,
    product_weights,
    residual_field,
    resolution_floor,
    resolvent_psi,
    time_space_convolve,
    transition_density,
)
