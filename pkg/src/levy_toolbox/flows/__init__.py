from __future__ import annotations

from .__methods import (
    FlowKind,
    flow_property_report,
    lipschitz_estimate,
    mollification_gap,
    mollified_drift,
    picard_regressor,
    picard_trajectory,
    solve_chi,
    solve_chi_overline,
    solve_chi_t,
    solve_flow,
    solve_kappa,
)
from .classes import FlowConfig, FlowPropertyReport, MollifierSpec, Trajectory
