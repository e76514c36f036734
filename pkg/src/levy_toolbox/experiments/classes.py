from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
from pathlib import Path
import typing as t

log = logging.getLogger("levy_toolbox.experiments.classes")

from levy_toolbox.exc import ConfigurationError

from .constants import COMMANDS, DEFAULT_OUTPUT_DIR, DEFAULT_SEED

import pandas as pd

_MISSING = object()


@dataclass(frozen=True)
class ExperimentConfig:
    """One pipeline run: the command, the model it runs on and its parameters.

    Command-specific parameters stay in `params` and are read with `param()`.
    """

    command: str
    model_path: Path | None = None
    source: Path | None = None
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    seed: int = DEFAULT_SEED
    workers: int | None = None
    synthetic_inject: float | None = None
    params: dict[str, t.Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            msg = ConfigurationError(f"Unknown command '{self.command}'. Expected one of: {', '.join(COMMANDS)}")
            log.error(msg)

            raise msg

    def param(self, name: str, default: t.Any = _MISSING) -> t.Any:
        """A command parameter, or `default` when absent.

        Raises:
            ConfigurationError: When the parameter is absent and has no default.

        """
        if name in self.params:
            return self.params[name]
        if default is _MISSING:
            msg = ConfigurationError(f"Command '{self.command}' needs parameter '{name}'")
            log.error(msg)

            raise msg

        return default

    def with_overrides(
        self,
        output_dir: str | Path | None = None,
        seed: int | None = None,
        workers: int | None = None,
        synthetic_inject: float | None = None,
    ) -> ExperimentConfig:
        """Apply command-line flags on top of the file values."""
        return replace(
            self,
            output_dir=Path(output_dir) if output_dir is not None else self.output_dir,
            seed=self.seed if seed is None else seed,
            workers=self.workers if workers is None else workers,
            synthetic_inject=self.synthetic_inject if synthetic_inject is None else synthetic_inject,
        )


@dataclass
class CommandResult:
    """Table, report entries and verdict of one pipeline, plus optional extra tables."""

    frame: pd.DataFrame
    entries: dict[str, t.Any]
    passed: bool = True
    extra: dict[str, pd.DataFrame] = field(default_factory=dict)


@dataclass(frozen=True)
class RunOutcome:
    command: str
    exit_code: int
    artifacts: tuple[Path, ...] = ()

    @property
    def csv_path(self) -> Path | None:
        return next((path for path in self.artifacts if path.suffix == ".csv"), None)

    @property
    def report_path(self) -> Path | None:
        return next((path for path in self.artifacts if path.suffix == ".txt"), None)
