"""Report and CSV output.

Reports are JSON objects carrying ``schema_version``; readers ignore fields
they do not know.  CSV files use fixed column orders (``t,w,x,y,z`` for
trajectories, ``w,x,y,z`` for point sets) and ``%.17g`` formatting, so equal
inputs give byte-identical files.
"""
from __future__ import annotations

import json
from enum import Enum
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
FLOAT_FMT = "%.17g"
POINT_COLUMNS = ("w", "x", "y", "z")
TRAJECTORY_COLUMNS = ("t", "w", "x", "y", "z")


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Enum):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def new_report(command: str, **fields) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "checks": {}, **fields}


def all_pass(report: dict) -> bool:
    """True when every recorded check passes (an empty report passes)."""
    checks = report.get("checks", {})
    return all(bool(c.get("pass", False)) for c in checks.values())


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_default) + "\n"


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report))
    return path


def read_report(path) -> dict:
    """Load a report; missing version means version 1, extra fields are kept."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("report must be a JSON object")
    data.setdefault("schema_version", SCHEMA_VERSION)
    data.setdefault("checks", {})
    return data


def write_csv(path, rows, columns=POINT_COLUMNS) -> Path:
    rows = np.asarray(rows, dtype=float)
    if rows.size == 0:
        rows = rows.reshape(0, len(columns))
    if rows.ndim != 2 or rows.shape[1] != len(columns):
        raise ValueError(f"expected {len(columns)} columns, got shape {rows.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for r in rows:
            fh.write(",".join(FLOAT_FMT % v for v in r) + "\n")
    return path


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def export(report: dict, out_dir, artifacts: dict | None = None) -> dict:
    """Write ``report.json`` and one ``<name>.csv`` per artifact.

    An artifact is an array or a ``(array, columns)`` pair; arrays with four
    columns get ``w,x,y,z``, others ``v1..vn``.  Returns the written paths
    keyed by artifact name.
    """
    out = Path(out_dir)
    written = {"report": write_report(report, out / "report.json")}
    for name, rows in sorted((artifacts or {}).items()):
        cols = None
        if isinstance(rows, tuple):
            rows, cols = rows
        rows = np.asarray(rows, dtype=float)
        if cols is None:
            cols = POINT_COLUMNS if rows.ndim != 2 or rows.shape[1] == 4 else \
                tuple(f"v{i + 1}" for i in range(rows.shape[1]))
        written[name] = write_csv(out / f"{name}.csv", rows, cols)
    return written
