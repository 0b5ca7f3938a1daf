"""Deterministic CSV and JSON writers for the command-line artifacts."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """Round-trip-safe decimal text with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x) + 0.0  # drop the sign of zero
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_csv(path, header: list[str], rows, params: dict | None = None) -> Path:
    """Comma-separated table; an optional leading ``# key=value`` line echoes parameters."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if params:
            fh.write("# " + " ".join(f"{k}={_echo(v)}" for k, v in sorted(params.items())) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[dict, list[str], np.ndarray]:
    """Inverse of :func:`write_csv`: (params, header, data)."""
    lines = Path(path).read_text().splitlines()
    params = {}
    if lines and lines[0].startswith("# "):
        for item in lines.pop(0)[2:].split():
            k, _, v = item.partition("=")
            params[k] = v
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return params, header, data


def _echo(v) -> str:
    return fmt(v) if isinstance(v, (int, float, np.number)) and not isinstance(v, bool) else str(v)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def tagged(value, method: str) -> dict:
    return {"value": value, "method": method}
