from __future__ import annotations

import numpy as np

HERMITE_NODES: int = 64
## Mollifier standard deviation is BANDWIDTH_FACTOR * t^(1/alpha)
BANDWIDTH_FACTOR: float = float(1.0 / np.sqrt(2.0))

DEFAULT_STEPS: int = 64
## Mesh s = t v^gamma with gamma = GRADING_ORDER * max(1, alpha)
GRADING_ORDER: float = 5.0
ENDPOINT_RTOL: float = 1e-8
MAX_DOUBLINGS: int = 8
## The drift is never evaluated before DRIFT_TIME_FLOOR * t; b_t may be singular at t = 0
DRIFT_TIME_FLOOR: float = 1e-12

## Randomised flow inequalities: start points in [-PROPERTY_X_RANGE, PROPERTY_X_RANGE], times from PROPERTY_TIMES
PROPERTY_SAMPLES: int = 500
PROPERTY_SEED: int = 0
PROPERTY_TIMES: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
PROPERTY_X_RANGE: float = 3.0
## Pairs closer than this are skipped by the sandwich fit
SANDWICH_MIN_GAP: float = 1e-3
## Growth cone is checked on 2 <= |x| <= 50
CONE_RANGE: tuple[float, float] = (2.0, 50.0)
