from __future__ import annotations

from . import presets
from .__methods import (
    compensated_drift,
    delta_exponents,
    drift_compensation_gap,
    holder_quotient,
    is_constant_coefficient,
    partial_compensator,
    partially_compensated_drift,
    residual_moment,
    sde_model,
    stable_truncation_integral,
    validate_model,
)
from .classes import (
    Atom,
    DeltaExponents,
    DensityResidual,
    ModelSpec,
    PointMassResidual,
    ResidualKernel,
    SampleGrid,
    ValidationCheck,
    ValidationReport,
    evaluate,
)
from .expressions import Expression
from .loader import dump_model, load_model, model_from_mapping, model_to_mapping
