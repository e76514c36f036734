from __future__ import annotations

## Relative tolerance of adaptive Levy-measure quadrature
LEVY_QUAD_RTOL: float = 1e-10
## delta = DELTA_SAFETY * min(delta_eta, delta_zeta, delta_beta)
DELTA_SAFETY: float = 0.9
## Default validation grid
VALIDATION_X_MIN: float = -10.0
VALIDATION_X_MAX: float = 10.0
VALIDATION_N_POINTS: int = 401
## Radii r in (0, 1] checked for r^beta |nu|(x, {|u| > r})
ACTIVITY_RADII: tuple[float, ...] = tuple(2.0**-k for k in range(21))
## A measured constant above this is reported as unbounded on the grid
BOUNDED_LIMIT: float = 1e6
## Points for constant-coefficient detection
CONSTANCY_POINTS: tuple[float, ...] = (-7.3, -2.1, -0.4, 0.0, 0.9, 3.3, 8.1)
