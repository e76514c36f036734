from __future__ import annotations

## Commands understood by `run`, one per pipeline
COMMANDS: tuple[str, ...] = (
    "density-slice",
    "flow",
    "phi-diagnostics",
    "parametrix",
    "scaling",
    "validate-model",
    "kernel-props",
)
## kernel-props can run from explicit indices alone
MODEL_OPTIONAL: frozenset[str] = frozenset({"kernel-props"})

DEFAULT_OUTPUT_DIR: str = "results"
DEFAULT_SEED: int = 0

## Acceptance margins on fitted log-log slopes
PHI_SLOPE_MARGIN: float = 0.1
RESIDUAL_SLOPE_MARGIN: float = 0.1
## Closed-form Cauchy check of density slices
CAUCHY_TOL: float = 1e-6

DEFAULT_T_LIST: tuple[float, ...] = (0.4, 0.2, 0.1, 0.05)
DEFAULT_FLOW_KINDS: tuple[str, ...] = ("chi", "kappa", "chi_t", "chi_overline")
