from __future__ import annotations

import numpy as np

## Fourier truncation: exp(-TRUNCATION_EXPONENT) < 1e-14 at xi_max
TRUNCATION_EXPONENT: float = 40.0
TRUNCATION_POINTS: tuple[float, float] = (1.0, 2.0)

NEGATIVE_GATE: float = 1e-9
CONSISTENCY_TOL: float = 1e-8

GL_ORDER: int = 16
N_HALVINGS: int = 60
## Upper bound on (evaluation points) x (Fourier nodes) per inversion block
BLOCK_ELEMENTS: int = 4_000_000

FFT_PADDING: int = 8
FFT_COLUMN_BLOCK: int = 64

## Small-jump cutoff below which fractional operators use their Taylor expansion
TAYLOR_CUTOFF: float = 1e-3
QUAD_LIMIT: int = 500

EULER_GAMMA: float = float(np.euler_gamma)

## Points calibrating the affine map from the standard parametrisation, then validating it
AFFINE_FIT_POINTS: tuple[float, float] = (1.0, 0.5)
AFFINE_CHECK_POINTS: tuple[float, ...] = (-7.5, -3.0, -1.3, -0.6, -0.1, 0.2, 0.8, 1.7, 4.2, 9.0)

DENSITY_KINDS: tuple[str, ...] = ("density", "dw", "dww", "dlambda", "drho", "sym", "asym")
INVERSION_MODES: tuple[str, ...] = ("panels", "fft", "adaptive")
