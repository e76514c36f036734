from __future__ import annotations

import logging
from pathlib import Path
import typing as t

log = logging.getLogger("levy_toolbox.utils.io_utils")

import pandas as pd

CSV_FLOAT_FORMAT: str = "%.12e"


def ensure_dir(path: str | Path) -> Path:
    """Create a directory (and parents) if it does not exist, return it as a `Path`."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except Exception as exc:
        msg = Exception(f"Unable to create output directory '{out}'. Details: {exc}")
        log.error(msg)

        raise exc

    return out


def write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write a DataFrame as CSV with a fixed float format, so reruns are byte-identical.

    Params:
        frame (pd.DataFrame): Table to write. The index is not written.
        path (str | Path): Destination file.

    Returns:
        (Path): The written path.

    """
    out = Path(path)
    ensure_dir(out.parent)

    frame.to_csv(out, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    log.debug(f"Wrote {len(frame)} row(s) to '{out}'")

    return out


def write_report(
    entries: t.Mapping[str, t.Any],
    path: str | Path,
    metadata: t.Mapping[str, t.Any] | None = None,
) -> Path:
    """Write a plain-text `key = value` report, metadata block first.

    Params:
        entries (Mapping[str, Any]): Diagnostics, one line each, in insertion order.
        path (str | Path): Destination file.
        metadata (Mapping[str, Any] | None): Run metadata (seed, timestamps, ...).

    Returns:
        (Path): The written path.

    """
    out = Path(path)
    ensure_dir(out.parent)

    lines: list[str] = []
    if metadata:
        lines.append("[metadata]")
        lines.extend(f"{key} = {_fmt(value)}" for key, value in metadata.items())
        lines.append("")

    lines.append("[diagnostics]")
    lines.extend(f"{key} = {_fmt(value)}" for key, value in entries.items())

    out.write_text("\n".join(lines) + "\n")

    return out


def _fmt(value: t.Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"

    return str(value)
