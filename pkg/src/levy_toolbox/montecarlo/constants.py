from __future__ import annotations

## Euler defaults
DEFAULT_DT: float = 1e-3
DEFAULT_JUMP_CUT: float = 0.1
DEFAULT_N_PATHS: int = 100_000
DEFAULT_SEED: int = 0
## Paths per independently seeded chunk; results do not depend on the worker count
CHUNK_SIZE: int = 2**15
## A step must resolve the horizon: dt <= t / MIN_STEPS
MIN_STEPS: int = 16

## |X| above this aborts the run
EXPLOSION_LIMIT: float = 1e12

## Thinning envelope scale: THINNING_SAFETY * max of q_nu / envelope over a window around x0;
#  a path leaving the window where q_nu exceeds the envelope aborts the run
THINNING_SAFETY: float = 1.5
THINNING_WINDOW_HALFWIDTH: float = 20.0
THINNING_WINDOW_POINTS: int = 201

## Monte Carlo noise floor NOISE_FLOOR_FACTOR / sqrt(n)
NOISE_FLOOR_FACTOR: float = 2.0
## Required log-log slope SLOPE_FRACTION * delta
SLOPE_FRACTION: float = 0.5
## Regressors with coefficients frozen at the start point converge at rate min(delta, zeta)
FROZEN_VARIANTS: frozenset[str] = frozenset({"frozen", "frozen_overline"})
MIN_T_POINTS: int = 3
BOOTSTRAP_DRAWS: int = 2000

STATUS_OK: str = "ok"
STATUS_INCONCLUSIVE: str = "inconclusive"
STATUS_EXACT: str = "inconclusive-by-exactness"
