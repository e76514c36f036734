from __future__ import annotations

from .__methods import (
    PIPELINES,
    density_slice_command,
    flow_command,
    kernel_props_command,
    parametrix_command,
    phi_diagnostics_command,
    run_experiment,
    scaling_command,
    validate_model_command,
)
from .classes import CommandResult, ExperimentConfig, RunOutcome
from .constants import COMMANDS
from .loader import experiment_from_mapping, load_experiment
