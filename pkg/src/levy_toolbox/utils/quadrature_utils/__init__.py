from __future__ import annotations

from .__methods import (
    composite_gauss_legendre,
    geometric_breakpoints,
    graded_mesh,
    oscillatory_breakpoints,
    power_law_nodes,
    simpson_weights,
)
