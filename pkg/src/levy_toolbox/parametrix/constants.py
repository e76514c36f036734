from __future__ import annotations

MIN_GRID_POINTS: int = 16
DEFAULT_GRID_POINTS: int = 512
## Centred grids span +- (GRID_SCALE_WIDTH * t^(1/alpha) + GRID_PAD)
GRID_SCALE_WIDTH: float = 40.0
GRID_PAD: float = 10.0

## Resolvent series truncation and time quadrature
DEFAULT_ORDER: int = 3
DEFAULT_TIME_NODES: int = 16
## Fields are never evaluated at times whose scale t^(1/alpha) is below this many grid spacings
RESOLUTION_CELLS: float = 2.0
## Ratio of consecutive fitted envelope constants above which the series is flagged
GROWTH_TOLERANCE: float = 10.0
TAIL_TERMS: int = 20

## Grid coverage: relative mass allowed within the outer EDGE_FRACTION of a row
COVERAGE_TOL: float = 1e-3
EDGE_FRACTION: float = 0.05
## Diagnostics taken over rows within this fraction of the half-width around the centre
INTERIOR_FRACTION: float = 0.5

## Gauss-Legendre order of the residual-jump quadrature
JUMP_ORDER: int = 8
