from __future__ import annotations

## Property suite defaults
PROPERTY_SAMPLES: int = 1000
PROPERTY_SEED: int = 0
MULT_FACTOR: float = 0.5
LOG_RANGE: tuple[float, float] = (-3.0, 3.0)
BINT_TIMES: tuple[float, ...] = (1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01)
## Randomised (s, t, x, y) points of the sub-convolution check, kept smaller than the others
SUBCONV_SAMPLES: int = 200
