from __future__ import annotations

import logging
import platform

from levy_toolbox.experiments import COMMANDS
from levy_toolbox.main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, run, setup_logging

import pytest


@pytest.fixture
def smooth_model_path(configs_dir):
    return str(configs_dir / "models" / "smooth_test.json")


def test_commands_lists_pipelines(capsys):
    assert run(["commands"]) == EXIT_OK
    assert capsys.readouterr().out.split() == list(COMMANDS)


def test_run_writes_artifacts(tmp_path, write_json, smooth_model_path):
    config = write_json(
        "validate.json",
        {"command": "validate-model", "model": smooth_model_path, "params": {"n_points": 41}},
    )

    assert run(["run", str(config), "--output", str(tmp_path / "out")]) == EXIT_OK
    assert (tmp_path / "out" / "validate_model.csv").exists()
    assert (tmp_path / "out" / "validate_model_report.txt").exists()


def test_failed_check_exits_one(tmp_path, write_json, smooth_model_path):
    config = write_json(
        "scaling.json",
        {"command": "scaling", "model": smooth_model_path, "params": {"t_list": [0.4, 0.2, 0.1], "n_paths": 1000}},
    )

    assert run(["run", str(config), "--output", str(tmp_path), "--synthetic-inject", "0.1"]) == EXIT_FAILED
    assert run(["run", str(config), "--output", str(tmp_path), "--synthetic-inject", "0.6"]) == EXIT_OK


def test_module_error_exits_one(tmp_path, write_json, smooth_model_path):
    config = write_json(
        "short.json", {"command": "scaling", "model": smooth_model_path, "params": {"t_list": [0.2, 0.1]}}
    )

    assert run(["run", str(config), "--output", str(tmp_path), "--synthetic-inject", "0.5"]) == EXIT_FAILED


def test_configuration_errors_exit_two(tmp_path, write_json):
    unknown_key = write_json("unknown.json", {"command": "kernel-props", "colour": "red"})
    unknown_command = write_json("command.json", {"command": "plot", "model": None})

    assert run(["run", str(unknown_key)]) == EXIT_CONFIG
    assert run(["run", str(unknown_command)]) == EXIT_CONFIG
    assert run(["run", str(tmp_path / "absent.json")]) == EXIT_CONFIG
    assert run(["run", str(unknown_key), "--seed", "many"]) == EXIT_CONFIG


def test_setup_logging_reports_python_version(caplog):
    with caplog.at_level(logging.DEBUG, logger="levy_toolbox.main"):
        setup_logging(log_level="DEBUG")

    assert f"Python version: {platform.python_version()}" in caplog.text
