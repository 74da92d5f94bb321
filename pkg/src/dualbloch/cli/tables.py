"""Plain-text column tables with '#' headers that carry the resolved run configuration."""

from __future__ import annotations

import json
import platform
import warnings
from pathlib import Path

import numpy as np

from .. import __version__
from .._backend import BACKEND

FLOAT_FMT = "%.9g"


def versions() -> dict:
    return {
        "dualbloch": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "kernel_backend": BACKEND,
    }


def header_lines(command: str, config: dict, columns, extra: dict | None = None) -> list[str]:
    lines = [
        f"dualbloch {__version__} {command}",
        f"seed: {config['seed']}",
        "versions: " + json.dumps(versions(), sort_keys=True),
        "config: " + json.dumps(config, sort_keys=True, separators=(",", ":")),
    ]
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
    lines.append("columns: " + " ".join(columns))
    return lines


def write_table(path: Path, command: str, config: dict, columns, data,
                extra: dict | None = None, fmt=FLOAT_FMT) -> Path:
    """Write ``data`` (rows x columns) with a self-describing header.

    ``fmt`` may be a single format or one per column (strings use ``%s``).
    """
    path = Path(path)
    header = "\n".join(header_lines(command, config, columns, extra))
    np.savetxt(path, data, fmt=fmt, delimiter="\t", header=header, comments="# ")
    return path


def config_from_header(text: str) -> dict | None:
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line.lstrip("#").strip()
        if body.startswith("config: "):
            return json.loads(body[len("config: "):])
    return None


def read_series(path) -> np.ndarray:
    """Load a one-column series or a (t, value) table; returns ``(n, 1)`` or ``(n, 2)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # empty file; reported below
        data = np.loadtxt(path, comments="#", ndmin=2)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    if data.shape[1] not in (1, 2):
        raise ValueError(f"{path}: expected 1 or 2 columns, got {data.shape[1]}")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite values")
    return data
