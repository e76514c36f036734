from __future__ import annotations

from .__methods import (
    FittedConstant,
    SlopeFit,
    bootstrap_slope_halfwidth,
    fit_constant,
    fit_loglog_slope,
    fit_stable_constant,
)
