from __future__ import annotations

import logging
from pathlib import Path
import typing as t

log = logging.getLogger("levy_toolbox.cli._cli_experiments")

from levy_toolbox.experiments import COMMANDS, load_experiment, run_experiment

from cyclopts import App, Parameter, validators

experiments_app = App(
    name="run",
    help=f"Run an experiment defined in a JSON config. Commands: {', '.join(COMMANDS)}.",
)


@experiments_app.default
def run_config(
    config: t.Annotated[Path, Parameter(validator=validators.Path(exists=True))],
    *,
    output: Path | None = None,
    seed: int | None = None,
    workers: int | None = None,
    synthetic_inject: float | None = None,
) -> int:
    """Run the pipeline named in the config and write its CSV and report.

    Parameters
    ----------
    config
        Experiment definition (JSON).
    output
        Output directory, overrides the config.
    seed
        Random seed, overrides the config.
    workers
        Worker cap for parallel sections; 0 means all CPUs.
    synthetic_inject
        Testing hook: replace simulated distances in `scaling` by `t^VALUE`.

    """
    experiment = load_experiment(config).with_overrides(
        output_dir=output, seed=seed, workers=workers, synthetic_inject=synthetic_inject
    )
    log.debug(f"Experiment: {experiment}")

    outcome = run_experiment(experiment)
    for artifact in outcome.artifacts:
        log.info(f"Wrote {artifact}")

    return outcome.exit_code
