from __future__ import annotations

import logging
import typing as t

log = logging.getLogger("levy_toolbox.cli.cli_main")

from levy_toolbox.cli._cli_experiments import experiments_app
from levy_toolbox.experiments import COMMANDS
from levy_toolbox.main import setup_logging

from cyclopts import App, Parameter

cli_app = App(
    name="levy-toolbox",
    help="Stable approximations of transition densities for locally alpha-stable Levy-type processes. Run with -h to see help menu.",
    version="0.1.0",
)

cli_app.command(experiments_app)


@cli_app.command(name="commands")
def list_commands() -> int:
    """List the pipelines an experiment config can name."""
    for command in COMMANDS:
        print(command)

    return 0


@cli_app.meta.default
def cli_launcher(
    *tokens: t.Annotated[str, Parameter(show=False, allow_leading_hyphen=True)],
    log_level: str = "INFO",
) -> int | None:
    setup_logging(log_level=log_level.upper())

    return cli_app(tokens, exit_on_error=False)
