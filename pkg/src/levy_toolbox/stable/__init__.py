from __future__ import annotations

from .__methods import (
    asymmetric_exponent,
    exponent_from_parts,
    resolve_xi_max,
    stable_cdf,
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
from .classes import DensityKind, InversionMode, InversionSpec, StableParams, stable_constant
from .operators import frac_op, kernel_G_alpha
from .sampling import (
    AffineMap,
    affine_correction,
    sample_stable,
    sample_stable_batch,
    standard_exponent,
    standard_stable_variates,
)
