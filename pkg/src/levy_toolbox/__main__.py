from __future__ import annotations

import logging
import sys

log = logging.getLogger("levy_toolbox")

from levy_toolbox.main import run

if __name__ == "__main__":
    sys.exit(run())
