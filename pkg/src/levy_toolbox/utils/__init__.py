from __future__ import annotations

from . import env_utils, fit_utils, io_utils, quadrature_utils
