from __future__ import annotations

## Flows along which the model coefficients are averaged
FLOW_VARIANTS: tuple[str, ...] = ("chi", "kappa_tilde", "chi_t_overline")
## Choices of regressor and innovation law; `picard` takes an order, e.g. `picard(2)`
REGRESSOR_VARIANTS: tuple[str, ...] = ("chi", "chi_t_overline", "picard", "frozen", "frozen_overline")
DEFAULT_PICARD_ORDER: int = 1

## Density slices span the regressor +- (SLICE_SCALE_WIDTH * t^(1/alpha) + SLICE_PAD)
SLICE_SCALE_WIDTH: float = 40.0
SLICE_PAD: float = 10.0
SLICE_POINTS: int = 801
