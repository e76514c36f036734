from __future__ import annotations

from .__cli import experiments_app
