"""Read experiment definitions.

```json
{
  "command": "scaling",
  "model": "../models/smooth_test.json",
  "output": "results/scaling",
  "seed": 7,
  "params": {"x0": 0.0, "t_list": [0.4, 0.2, 0.1, 0.05], "n_paths": 1000000, "dt": 0.001}
}
```

`model` is resolved against the directory of the experiment file.
"""

from __future__ import annotations

from dataclasses import replace
import json
import logging
from pathlib import Path
import typing as t

log = logging.getLogger("levy_toolbox.experiments.loader")

from levy_toolbox.exc import ConfigurationError

from .classes import ExperimentConfig
from .constants import DEFAULT_OUTPUT_DIR, DEFAULT_SEED, MODEL_OPTIONAL

KNOWN_KEYS: frozenset[str] = frozenset(
    {"command", "model", "output", "seed", "workers", "synthetic_inject", "params", "description"}
)


def experiment_from_mapping(mapping: t.Mapping[str, t.Any], base_dir: str | Path | None = None) -> ExperimentConfig:
    """Build an `ExperimentConfig` from a parsed JSON object.

    Raises:
        ConfigurationError: On unknown keys, a missing command or model, or a model file that does
            not exist.

    """
    unknown = set(mapping) - KNOWN_KEYS
    if unknown:
        raise ConfigurationError(f"Experiment definition has unknown key(s): {sorted(unknown)}")
    if "command" not in mapping:
        raise ConfigurationError("Experiment definition needs a 'command'")

    command = str(mapping["command"])
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    model_path: Path | None = None
    if mapping.get("model") is not None:
        model_path = Path(mapping["model"])
        if not model_path.is_absolute():
            model_path = base / model_path
        if not model_path.exists():
            msg = ConfigurationError(f"Model file not found: {model_path}")
            log.error(msg)

            raise msg
    elif command not in MODEL_OPTIONAL:
        raise ConfigurationError(f"Command '{command}' needs a 'model' file")

    params = mapping.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigurationError("'params' must be a JSON object")

    try:
        workers = mapping.get("workers")
        inject = mapping.get("synthetic_inject")

        return ExperimentConfig(
            command=command,
            model_path=model_path,
            output_dir=Path(mapping.get("output", DEFAULT_OUTPUT_DIR)),
            seed=int(mapping.get("seed", DEFAULT_SEED)),
            workers=None if workers is None else int(workers),
            synthetic_inject=None if inject is None else float(inject),
            params=dict(params),
        )
    except (TypeError, ValueError) as exc:
        msg = ConfigurationError(f"Invalid value in experiment definition. Details: {exc}")
        log.error(msg)

        raise msg from exc


def load_experiment(path: str | Path) -> ExperimentConfig:
    """Load an experiment definition from a JSON file."""
    path = Path(path)

    if not path.exists():
        raise ConfigurationError(f"Experiment file not found: {path}")

    try:
        mapping = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        msg = ConfigurationError(f"Unable to parse experiment file '{path}'. Details: {exc}")
        log.error(msg)

        raise msg from exc

    if not isinstance(mapping, dict):
        raise ConfigurationError(f"Experiment file '{path}' must contain a JSON object")

    config = experiment_from_mapping(mapping, base_dir=path.parent)
    log.debug(f"Loaded '{config.command}' experiment from {path}")

    return replace(config, source=path)
