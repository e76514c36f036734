from __future__ import annotations

from .__methods import (
    F_abg,
    G_abg,
    N_beta,
    kernel_integral,
    kernel_property_report,
    residual_bound_params,
    self_convolution_G,
    subconvolution,
)
from .classes import KernelParams, KernelPropertyReport, ResidualBoundParams
