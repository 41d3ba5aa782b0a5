"""CSV / JSON output with atomic writes."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def columns_csv(columns: dict[str, np.ndarray]) -> str:
    """One row per grid point; header mandatory; full-precision numbers."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in data:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_columns_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    return {name: body[:, j] for j, name in enumerate(header)}


def states_columns(times: np.ndarray, states: np.ndarray) -> dict[str, np.ndarray]:
    d = states.shape[1]
    cols = {"t": np.asarray(times)}
    for i in range(d):
        for j in range(d):
            cols[f"re_{i}_{j}"] = states[:, i, j].real
            cols[f"im_{i}_{j}"] = states[:, i, j].imag
    return cols


def read_states_csv(path) -> tuple[np.ndarray, np.ndarray]:
    cols = read_columns_csv(path)
    n_entries = (len(cols) - 1) // 2
    d = int(round(np.sqrt(n_entries)))
    states = np.empty((len(cols["t"]), d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            states[:, i, j] = cols[f"re_{i}_{j}"] + 1j * cols[f"im_{i}_{j}"]
    return cols["t"], states


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n"
