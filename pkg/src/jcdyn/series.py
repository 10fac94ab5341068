"""Tabular results with deterministic CSV/JSON writers.

A :class:`TimeSeries` is an axis (time in units of 1/g, or a parameter ratio
for spectral sweeps) plus named real-valued columns and a metadata mapping
that echoes the configuration that produced it.  Floats are written with 17
significant digits so files round-trip float64 exactly; CSV output contains
no timestamps and is therefore byte-stable across reruns.
"""
from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["TimeSeries", "write_csv", "write_json", "read_csv", "read_json"]


@dataclass
class TimeSeries:
    axis: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict[str, object] = field(default_factory=dict)
    axis_name: str = "t_over_g"

    def __post_init__(self) -> None:
        self.axis = np.asarray(self.axis, dtype=float)
        if self.axis.ndim != 1:
            raise ValueError(f"axis must be one-dimensional, got shape {self.axis.shape}")
        if not self.columns:
            raise ValueError("a series needs at least one column")
        clean: dict[str, np.ndarray] = {}
        for name, col in self.columns.items():
            arr = np.asarray(col)
            if np.iscomplexobj(arr):
                raise ValueError(f"column {name!r} is complex; store real observables only")
            arr = arr.astype(float)
            if arr.shape != self.axis.shape:
                raise ValueError(
                    f"column {name!r} has length {arr.shape}, axis has {self.axis.shape}"
                )
            clean[name] = arr
        self.columns = clean

    def __len__(self) -> int:
        return self.axis.size


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(ts: TimeSeries, path: str | Path) -> Path:
    """Write ``# key=value`` metadata lines, a header row, then the data."""
    path = Path(path)
    lines = [f"# version={__version__}"]
    for key, val in ts.metadata.items():
        lines.append(f"# {key}={val}")
    names = [ts.axis_name, *ts.columns]
    lines.append(",".join(names))
    data = np.column_stack([ts.axis, *ts.columns.values()])
    for row in data:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(ts: TimeSeries, path: str | Path) -> Path:
    """Write ``{config, columns, provenance}``; only provenance carries a timestamp."""
    path = Path(path)
    payload = {
        "config": {k: v for k, v in ts.metadata.items()},
        "columns": {
            ts.axis_name: [float(x) for x in ts.axis],
            **{name: [float(x) for x in col] for name, col in ts.columns.items()},
        },
        "provenance": {
            "version": __version__,
            "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        },
    }
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def read_csv(path: str | Path) -> TimeSeries:
    """Read a file produced by :func:`write_csv`; metadata values come back as strings."""
    meta: dict[str, object] = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, val = body.partition("=")
                meta[key.strip()] = val.strip()
            continue
        if header is None:
            header = [name.strip() for name in line.split(",")]
            continue
        rows.append([float(tok) for tok in line.split(",")])
    if header is None or not rows:
        raise ValueError(f"{path}: no data found")
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, i + 1] for i, name in enumerate(header[1:])}
    return TimeSeries(axis=data[:, 0], columns=columns, metadata=meta, axis_name=header[0])


def read_json(path: str | Path) -> TimeSeries:
    payload = json.loads(Path(path).read_text())
    cols = dict(payload["columns"])
    axis_name = next(iter(cols))
    axis = np.asarray(cols.pop(axis_name), dtype=float)
    meta = dict(payload.get("config", {}))
    meta["provenance"] = payload.get("provenance", {})
    return TimeSeries(
        axis=axis,
        columns={k: np.asarray(v, dtype=float) for k, v in cols.items()},
        metadata=meta,
        axis_name=axis_name,
    )
