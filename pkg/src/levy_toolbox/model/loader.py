"""Read and write model definitions as JSON.

```json
{
  "name": "smooth-test",
  "alpha": 1.2,
  "lambda": "1 + 0.3*sin(x)",
  "rho": "0.5*cos(x)",
  "b": "sin(x)",
  "eta": 1.0, "zeta": 1.0, "beta_activity": 0.1,
  "lambda_min": 0.7, "lambda_max": 1.3,
  "horizon_T": 1.0, "drift_bounded": true,
  "nu": {"type": "none"}
}
```

`nu` may also be `{"type": "density", "q_nu": "...", "beta": 0.5, "gamma": 2}` or
`{"type": "point_masses", "atoms": [{"position": "-x", "weight": 1}]}`.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
import typing as t

log = logging.getLogger("levy_toolbox.model.loader")

from levy_toolbox.exc import ConfigurationError, ModelSpecError

from .classes import Atom, DensityResidual, ModelSpec, PointMassResidual, ResidualKernel
from .expressions import Expression

REQUIRED_KEYS: frozenset[str] = frozenset({"alpha", "lambda", "rho", "b"})
SCALAR_KEYS: tuple[str, ...] = (
    "eta",
    "zeta",
    "beta_activity",
    "lambda_min",
    "lambda_max",
    "horizon_T",
)
OPTIONAL_KEYS: frozenset[str] = frozenset({"name", "nu", "drift_bounded", *SCALAR_KEYS})


def _residual_from_mapping(entry: t.Mapping[str, t.Any] | None) -> ResidualKernel:
    if entry is None:
        return None

    kind = str(entry.get("type", "none")).lower()

    if kind == "none":
        return None

    if kind == "density":
        try:
            return DensityResidual(
                q_nu=Expression(entry["q_nu"]),
                beta=float(entry["beta"]),
                gamma=float(entry["gamma"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"Density residual is missing key {exc}") from exc

    if kind == "point_masses":
        atoms = entry.get("atoms") or []
        if not atoms:
            raise ConfigurationError("Point-mass residual needs at least one atom")
        try:
            return PointMassResidual(
                atoms=tuple(
                    Atom(position_fn=Expression(atom["position"]), weight_fn=Expression(atom["weight"]))
                    for atom in atoms
                )
            )
        except KeyError as exc:
            raise ConfigurationError(f"Point-mass atom is missing key {exc}") from exc

    raise ConfigurationError(f"Unknown residual type '{kind}' (expected none, density or point_masses)")


def model_from_mapping(mapping: t.Mapping[str, t.Any]) -> ModelSpec:
    """Build a `ModelSpec` from a parsed JSON object.

    Raises:
        ConfigurationError: On missing or unknown keys, unparseable expressions, or a model that
            violates its structural invariants.

    """
    missing = REQUIRED_KEYS - set(mapping)
    if missing:
        raise ConfigurationError(f"Model definition is missing required key(s): {sorted(missing)}")

    unknown = set(mapping) - REQUIRED_KEYS - OPTIONAL_KEYS
    if unknown:
        raise ConfigurationError(f"Model definition has unknown key(s): {sorted(unknown)}")

    kwargs: dict[str, t.Any] = {key: float(mapping[key]) for key in SCALAR_KEYS if key in mapping}

    try:
        return ModelSpec(
            alpha=float(mapping["alpha"]),
            lambda_fn=Expression(mapping["lambda"]),
            rho_fn=Expression(mapping["rho"]),
            b_fn=Expression(mapping["b"]),
            nu=_residual_from_mapping(mapping.get("nu")),
            drift_bounded=bool(mapping.get("drift_bounded", False)),
            name=str(mapping.get("name", "model")),
            **kwargs,
        )
    except ModelSpecError as exc:
        msg = ConfigurationError(f"Model definition is not a valid model. Details: {exc}")
        log.error(msg)

        raise msg from exc


def load_model(path: str | Path) -> ModelSpec:
    """Load a model definition from a JSON file."""
    path = Path(path)

    if not path.exists():
        raise ConfigurationError(f"Model file not found: {path}")

    try:
        mapping = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        msg = ConfigurationError(f"Unable to parse model file '{path}'. Details: {exc}")
        log.error(msg)

        raise msg from exc

    if not isinstance(mapping, dict):
        raise ConfigurationError(f"Model file '{path}' must contain a JSON object")

    log.debug(f"Loaded model '{mapping.get('name', path.stem)}' from {path}")

    return model_from_mapping(mapping)


def _source(fn: t.Any, field: str) -> str:
    if not isinstance(fn, Expression):
        raise ConfigurationError(f"Field '{field}' is not an expression and cannot be written to JSON")

    return fn.source


def model_to_mapping(model: ModelSpec) -> dict[str, t.Any]:
    """Inverse of `model_from_mapping` for models whose fields are `Expression`s."""
    mapping: dict[str, t.Any] = {
        "name": model.name,
        "alpha": model.alpha,
        "lambda": _source(model.lambda_fn, "lambda"),
        "rho": _source(model.rho_fn, "rho"),
        "b": _source(model.b_fn, "b"),
        "eta": model.eta,
        "zeta": model.zeta,
        "beta_activity": model.beta_activity,
        "lambda_min": model.lambda_min,
        "lambda_max": model.lambda_max,
        "horizon_T": model.horizon_T,
        "drift_bounded": model.drift_bounded,
    }

    nu = model.nu
    if nu is None:
        mapping["nu"] = {"type": "none"}
    elif isinstance(nu, DensityResidual):
        mapping["nu"] = {
            "type": "density",
            "q_nu": _source(nu.q_nu, "nu.q_nu"),
            "beta": nu.beta,
            "gamma": nu.gamma,
        }
    else:
        mapping["nu"] = {
            "type": "point_masses",
            "atoms": [
                {"position": _source(a.position_fn, "nu.position"), "weight": _source(a.weight_fn, "nu.weight")}
                for a in nu.atoms
            ],
        }

    return mapping


def dump_model(model: ModelSpec, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_mapping(model), indent=2) + "\n", encoding="utf-8")

    return path
