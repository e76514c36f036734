from __future__ import annotations

import logging
import platform
import sys
import typing as t

log: logging.Logger = logging.getLogger("levy_toolbox.main")

from levy_toolbox.exc import ConfigurationError, LevyToolboxError

from cyclopts.exceptions import CycloptsError

## Exit codes of `run`
EXIT_OK: int = 0
EXIT_FAILED: int = 1
EXIT_CONFIG: int = 2


def setup_logging(
    log_level: str = "INFO",
    log_msg_fmt: (
        str | None
    ) = "%(asctime)s | %(levelname)s | %(name)s.%(funcName)s():%(lineno)d |> %(message)s",
    log_msg_datefmt: str = "%Y-%m-%d %H:%M:%S",
) -> None:
    logging.basicConfig(
        level=log_level,
        format=log_msg_fmt,
        datefmt=log_msg_datefmt,
    )
    log.debug(f"Python version: {platform.python_version()}")


def run(argv: t.Sequence[str] | None = None) -> int:
    """Entry point of the `levy-toolbox` script.

    Params:
        argv (Sequence[str] | None): Command-line tokens; `None` reads `sys.argv`.

    Returns:
        (int): 0 on success, 1 when a pipeline check fails or a module raises, 2 on a
            configuration or command-line error.

    """
    from levy_toolbox import cli

    try:
        result = cli.cli_app.meta(list(argv) if argv is not None else None, exit_on_error=False)
    except CycloptsError as parse_err:
        log.error(f"Invalid command line. Details: {parse_err}")

        return EXIT_CONFIG
    except ConfigurationError as config_err:
        log.error(f"Invalid configuration. Details: {config_err}")

        return EXIT_CONFIG
    except LevyToolboxError as exc:
        log.error(f"{type(exc).__name__}: {exc}")

        return EXIT_FAILED

    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
