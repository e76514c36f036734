from __future__ import annotations

from .__methods import resolve_workers
