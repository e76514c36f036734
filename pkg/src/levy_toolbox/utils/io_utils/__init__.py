from __future__ import annotations

from .__methods import ensure_dir, write_csv, write_report
