from __future__ import annotations

from .cli_main import cli_app
