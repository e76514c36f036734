from __future__ import annotations

import logging
import os

log = logging.getLogger("levy_toolbox.utils.env_utils")


def resolve_workers(workers: int | None = None) -> int:
    """Resolve the worker cap used by parallel sections.

    Params:
        workers (int | None): Requested number of workers. `None` or `0` means "all CPUs".

    Returns:
        (int): A positive worker count, never larger than the number of CPUs reported by the host.

    """
    cpus: int = os.cpu_count() or 1

    if workers is None or workers <= 0:
        return cpus

    if workers > cpus:
        log.debug(f"Requested {workers} workers, host reports {cpus} CPUs. Using {cpus}.")

        return cpus

    return workers
