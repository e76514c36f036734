from __future__ import annotations

from .__methods import (
    cramer_distance,
    euler_bias_check,
    ks_distance,
    sample_regression,
    sample_residual_jumps,
    scaling_experiment,
    simulate_paths,
)
from .classes import BiasCheck, DistanceRow, EulerConfig, ExperimentResult, noise_floor
