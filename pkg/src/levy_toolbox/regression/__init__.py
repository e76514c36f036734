from __future__ import annotations

from .__methods import (
    averaged_params,
    density_slice,
    picard_balance,
    principal_grid,
    principal_density,
    regression_law,
    time_integrated_exponent,
    weight_W,
    zero_order_column,
    zero_order_density,
)
from .classes import (
    AveragedParams,
    FlowVariant,
    RegressionLaw,
    RegressorChoice,
    RegressorVariant,
    ZeroOrderColumns,
)
