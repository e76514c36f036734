"""Pipelines behind the `run` command.

Each pipeline takes the experiment config and the loaded model and returns a table, report
entries and a verdict; `run_experiment` writes them as `<command>.csv` and
`<command>_report.txt` under the output directory.
"""

from __future__ import annotations

from datetime import datetime, timezone
import logging
import typing as t

log = logging.getLogger("levy_toolbox.experiments.methods")

from levy_toolbox.flows import FlowConfig, flow_property_report, lipschitz_estimate, mollification_gap, solve_flow
from levy_toolbox.kernels import kernel_property_report
from levy_toolbox.kernels.constants import PROPERTY_SAMPLES
from levy_toolbox.model import (
    ModelSpec,
    SampleGrid,
    delta_exponents,
    is_constant_coefficient,
    load_model,
    validate_model,
)
from levy_toolbox.montecarlo import EulerConfig, euler_bias_check, scaling_experiment
from levy_toolbox.parametrix import Grid, SeriesConfig, phi_total, transition_density
from levy_toolbox.parametrix.constants import DEFAULT_GRID_POINTS
from levy_toolbox.regression import density_slice
from levy_toolbox.regression.constants import SLICE_POINTS
from levy_toolbox.stable import stable_constant
from levy_toolbox.utils.fit_utils import fit_loglog_slope
from levy_toolbox.utils.io_utils import write_csv, write_report

from .classes import CommandResult, ExperimentConfig, RunOutcome
from .constants import (
    CAUCHY_TOL,
    DEFAULT_FLOW_KINDS,
    DEFAULT_T_LIST,
    PHI_SLOPE_MARGIN,
    RESIDUAL_SLOPE_MARGIN,
)

import numpy as np
import pandas as pd
from scipy import integrate


def _t_list(config: ExperimentConfig) -> list[float]:
    return [float(value) for value in config.param("t_list", DEFAULT_T_LIST)]


def _grid_for(config: ExperimentConfig, model: ModelSpec, t_: float) -> Grid:
    centre = float(config.param("x", 0.0))
    n_points = int(config.param("n_points", DEFAULT_GRID_POINTS))
    half_width = config.param("half_width", None)

    if half_width is None:
        return Grid.centred(centre, t_, model.alpha, n_points)

    return Grid(x_min=centre - float(half_width), x_max=centre + float(half_width), n_points=n_points)


def _scalar_entries(values: t.Mapping[str, t.Any]) -> dict[str, t.Any]:
    return {key: value for key, value in values.items() if isinstance(value, (bool, int, float, str))}


def _is_cauchy(model: ModelSpec) -> bool:
    return model.alpha == 1.0 and is_constant_coefficient(model) and float(model.rho(0.0)) == 0.0


def density_slice_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """Approximating density `y -> p~_t(x, y)` for one start point."""
    x = float(config.param("x", 0.0))
    t_ = float(config.param("t"))
    variant = str(config.param("variant", "chi"))

    frame = density_slice(model, x, t_, variant, int(config.param("n_points", SLICE_POINTS)))
    entries: dict[str, t.Any] = {
        "x": x,
        "t": t_,
        "variant": variant,
        "mass": float(integrate.trapezoid(frame["value"], frame["y"])),
    }

    passed = True
    if _is_cauchy(model):
        ## constant Cauchy model: the transition law is Cauchy with scale c_1 lambda t around x + b t
        scale = stable_constant(1.0) * float(model.lam(x)) * t_
        centre = x + float(model.b(x)) * t_
        exact = scale / (np.pi * (scale**2 + (frame["y"].to_numpy() - centre) ** 2))
        error = float(np.max(np.abs(frame["value"].to_numpy() - exact)))
        entries["cauchy_max_error"] = error
        passed = error < CAUCHY_TOL

    return CommandResult(frame=frame, entries=entries, passed=passed)


def flow_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """Trajectories of the flows from one or several start points, with mollification diagnostics."""
    x0 = np.atleast_1d(np.asarray(config.param("x", 0.0), dtype=float))
    t_ = float(config.param("t"))
    kinds = [str(kind) for kind in config.param("kinds", DEFAULT_FLOW_KINDS)]
    cfg = FlowConfig(n_steps=int(config.param("n_steps", FlowConfig().n_steps)))

    pieces: list[pd.DataFrame] = []
    entries: dict[str, t.Any] = {"t": t_}
    for kind in kinds:
        traj = solve_flow(model, x0, t_, kind, cfg)
        states = np.asarray(traj.states).reshape(traj.times.size, x0.size)
        for j, start in enumerate(x0):
            pieces.append(pd.DataFrame({"kind": kind, "x0": start, "s": traj.times, "value": states[:, j]}))
            entries[f"{kind}.endpoint[x0={start:g}]"] = float(states[-1, j])

    sample = SampleGrid()
    entries["mollification_gap"] = mollification_gap(model, t_, sample, cfg.mollifier)
    entries["lipschitz_B"] = lipschitz_estimate(model, t_, sample, cfg.mollifier)

    passed = True
    n_property = int(config.param("property_samples", 0))
    if n_property > 0:
        report = flow_property_report(model, n_property, config.seed, cfg=cfg)
        entries.update({f"property.{key}": value for key, value in report.as_dict().items()})
        passed = report.passed

    return CommandResult(frame=pd.concat(pieces, ignore_index=True), entries=entries, passed=passed)


def _slope_verdict(
    model: ModelSpec, times: list[float], values: list[float], required: float, label: str
) -> tuple[dict[str, t.Any], bool]:
    entries: dict[str, t.Any] = {f"{label}_required_slope": required}

    if is_constant_coefficient(model) or min(values) <= 0.0:
        ## nothing to fit: the quantity vanishes up to roundoff
        entries[f"{label}_status"] = "inconclusive-by-exactness"
        return entries, True

    fit = fit_loglog_slope(times, values)
    entries[f"{label}_slope"] = fit.slope
    entries[f"{label}_status"] = "ok"

    return entries, fit.slope >= required


def phi_diagnostics_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """`sup_x int |Phi_t| dy` and its parts over a list of times, with the log-log slope."""
    times = _t_list(config)
    rows: list[dict[str, t.Any]] = []

    for t_ in times:
        phi = phi_total(model, t_, _grid_for(config, model, t_))
        rows.append({"t": t_, **phi.diagnostics})
        log.info(f"Phi at t={t_:g}: {phi.diagnostics['phi_l1']:.4g}")

    delta = delta_exponents(model).delta
    entries, passed = _slope_verdict(
        model, times, [row["phi_l1"] for row in rows], -1.0 + delta - PHI_SLOPE_MARGIN, "phi_l1"
    )

    return CommandResult(frame=pd.DataFrame(rows), entries={"delta": delta, **entries}, passed=passed)


def parametrix_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """Transition density by the parametrix series over a list of times, with residual norms and their slope."""
    times = _t_list(config)
    series = SeriesConfig(
        K=int(config.param("K", SeriesConfig().K)),
        n_time_nodes=int(config.param("n_time_nodes", SeriesConfig().n_time_nodes)),
        fail_on_divergence=bool(config.param("fail_on_divergence", False)),
    )
    save_fields = bool(config.param("save_fields", False))

    rows: list[dict[str, t.Any]] = []
    extra: dict[str, pd.DataFrame] = {}
    for t_ in times:
        p = transition_density(model, t_, _grid_for(config, model, t_), series)
        rows.append({"t": t_, **_scalar_entries(p.diagnostics)})
        if save_fields:
            extra[f"parametrix_field_t{t_:g}"] = p.to_frame()

    delta = delta_exponents(model).delta
    entries, passed = _slope_verdict(
        model, times, [row["R_l1"] for row in rows], delta - RESIDUAL_SLOPE_MARGIN, "R_l1"
    )
    entries = {"delta": delta, "K": series.K, "n_time_nodes": series.n_time_nodes, **entries}

    for row in rows:
        if "series.envelope_C" in row:
            entries[f"envelope_C[t={row['t']:g}]"] = row["series.envelope_C"]
        if "p_upper_C" in row:
            entries[f"p_upper_C[t={row['t']:g}]"] = row["p_upper_C"]
        if "R_point_C" in row:
            entries[f"R_point_C[t={row['t']:g}]"] = row["R_point_C"]

    return CommandResult(frame=pd.DataFrame(rows), entries=entries, passed=passed, extra=extra)


def scaling_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """KS distance between the simulated law and the regression law, with its decay rate."""
    defaults = EulerConfig()
    cfg = EulerConfig(
        dt=float(config.param("dt", defaults.dt)),
        jump_cut=float(config.param("jump_cut", defaults.jump_cut)),
        n_paths=int(config.param("n_paths", defaults.n_paths)),
        seed=config.seed,
        workers=config.workers,
        chunk_size=int(config.param("chunk_size", defaults.chunk_size)),
    )
    x0 = float(config.param("x0", 0.0))
    times = _t_list(config)

    result = scaling_experiment(
        model,
        x0,
        times,
        variant=str(config.param("variant", "chi")),
        cfg=cfg,
        synthetic_inject=config.synthetic_inject,
    )
    entries = result.metadata()

    if config.synthetic_inject is None and bool(config.param("bias_check", False)):
        check = euler_bias_check(model, x0, min(times), cfg)
        entries.update({"bias_ks": check.ks, "bias_within_noise": check.within_noise})

    return CommandResult(frame=result.to_frame(), entries=entries, passed=not result.failed)


def validate_model_command(config: ExperimentConfig, model: ModelSpec) -> CommandResult:
    """Check the model assumptions on a sample grid."""
    defaults = SampleGrid()
    grid = SampleGrid(
        x_min=float(config.param("x_min", defaults.x_min)),
        x_max=float(config.param("x_max", defaults.x_max)),
        n_points=int(config.param("n_points", defaults.n_points)),
    )
    report = validate_model(model, grid)

    frame = pd.DataFrame(
        {
            "check": [check.name for check in report.checks],
            "passed": [check.passed for check in report.checks],
            "measured": [check.measured for check in report.checks],
            "limit": [np.nan if check.limit is None else check.limit for check in report.checks],
        }
    )

    return CommandResult(frame=frame, entries=report.as_dict(), passed=report.passed)


def kernel_props_command(config: ExperimentConfig, model: ModelSpec | None) -> CommandResult:
    """Fitted constants of the kernel inequalities and their stability under sample doubling."""
    if model is None:
        alpha, beta = float(config.param("alpha")), float(config.param("beta"))
    else:
        alpha = float(config.param("alpha", model.alpha))
        beta = float(config.param("beta", model.beta_activity))
    gamma = float(config.param("gamma", alpha))

    report = kernel_property_report(
        alpha, beta, gamma, n_samples=int(config.param("n_samples", PROPERTY_SAMPLES)), seed=config.seed
    )
    names = list(report.constants)
    frame = pd.DataFrame(
        {
            "property": names,
            "C": [report.constants[name].value for name in names],
            "C_doubled": [report.constants[name].value_doubled for name in names],
            "stable": [report.constants[name].stable for name in names],
            "n_samples": [report.constants[name].n_samples for name in names],
        }
    )

    return CommandResult(frame=frame, entries=report.as_dict(), passed=report.passed)


PIPELINES: dict[str, t.Callable[[ExperimentConfig, t.Any], CommandResult]] = {
    "density-slice": density_slice_command,
    "flow": flow_command,
    "phi-diagnostics": phi_diagnostics_command,
    "parametrix": parametrix_command,
    "scaling": scaling_command,
    "validate-model": validate_model_command,
    "kernel-props": kernel_props_command,
}


def run_experiment(config: ExperimentConfig) -> RunOutcome:
    """Run the pipeline named by `config.command` and write its artifacts.

    Returns:
        (RunOutcome): Exit code 0 when the pipeline's checks pass, 1 otherwise, and the written
            files. Errors raised by the pipelines propagate.

    """
    model = load_model(config.model_path) if config.model_path is not None else None
    log.info(f"Running '{config.command}' on model '{model.name if model else '-'}' (seed {config.seed})")

    result = PIPELINES[config.command](config, model)

    stem = config.command.replace("-", "_")
    artifacts = [write_csv(result.frame, config.output_dir / f"{stem}.csv")]
    artifacts.extend(write_csv(frame, config.output_dir / f"{name}.csv") for name, frame in result.extra.items())

    metadata = {
        "command": config.command,
        "model": model.name if model else "-",
        "config": str(config.source) if config.source else "-",
        "seed": config.seed,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    entries = {**result.entries, "passed": result.passed}
    artifacts.append(write_report(entries, config.output_dir / f"{stem}_report.txt", metadata))

    exit_code = 0 if result.passed else 1
    if exit_code:
        log.warning(f"'{config.command}' finished with failed checks; see {artifacts[-1]}")
    else:
        log.info(f"'{config.command}' passed; wrote {len(artifacts)} file(s) to {config.output_dir}")

    return RunOutcome(command=config.command, exit_code=exit_code, artifacts=tuple(artifacts))
