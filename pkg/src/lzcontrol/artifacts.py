"""Reading and writing run artifacts (CSV and JSON).

Floats are written with 17 significant digits, which is enough for every
IEEE double to survive a write/read cycle bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .controls import ControlField, ShapeFunction, TimeGrid
from .errors import ArtifactIOError, GridMismatchError, ParseError

CONTROL_HEADER = ("t", "C")
GRID_TOL = 1e-9


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_text(path, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc.strerror or exc}") from None


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"cannot read {path}: {exc.strerror or exc}") from None


def write_table(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row)
              for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def write_json(path, data: dict):
    _write_text(path, json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n")


def read_json(path) -> dict:
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object", 1)
    return data


def control_to_csv(control: ControlField) -> str:
    rows = [",".join(CONTROL_HEADER)]
    rows += [f"{fmt(t)},{fmt(c)}" for t, c in zip(control.times, control.samples)]
    return "\n".join(rows) + "\n"


def write_control_csv(path, control: ControlField):
    _write_text(path, control_to_csv(control))


def _infer_t_final(times: np.ndarray) -> float:
    # the first midpoint fixes the grid: t_0 = t_f / (2N); snap away last-bit error
    raw = float(times[0] * 2 * len(times))
    snapped = float(f"{raw:.15g}")
    return snapped if abs(snapped - raw) <= 4 * np.spacing(raw) else raw


def parse_control_text(text: str, shape: ShapeFunction | None = None,
                       t_final: float | None = None) -> ControlField:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty control file", 1)
    header = tuple(h.strip() for h in lines[0].split(","))
    if header != CONTROL_HEADER:
        raise ParseError(f"expected header 't,C', got {lines[0]!r}", 1)
    times, values = [], []
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, got {len(row)}", lineno)
        try:
            t, c = float(row[0]), float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric entry {','.join(row)!r}", lineno) from None
        if not (math.isfinite(t) and math.isfinite(c)):
            raise ParseError("non-finite entry", lineno)
        times.append(t)
        values.append(c)
    if not values:
        raise ParseError("control file has no samples", 2)
    times = np.array(times)
    tf = t_final if t_final is not None else _infer_t_final(times)
    try:
        grid = TimeGrid(len(values), tf)
    except ValueError as exc:
        raise GridMismatchError(str(exc), 2) from None
    bad = np.flatnonzero(np.abs(times - grid.midpoints) > GRID_TOL * grid.t_final)
    if bad.size:
        k = int(bad[0])
        raise GridMismatchError(
            f"time {float(times[k])!r} is off the uniform midpoint grid "
            f"(expected {float(grid.midpoints[k])!r} for N={grid.n}, t_f={grid.t_final!r})", k + 2)
    return ControlField(grid, np.array(values), shape or ShapeFunction())


def parse_control_csv(path, shape: ShapeFunction | None = None,
                      t_final: float | None = None) -> ControlField:
    """Read a ``t,C`` file written by :func:`write_control_csv`."""
    try:
        return parse_control_text(_read_text(path), shape, t_final)
    except ParseError as exc:
        exc.args = (f"{path}: {exc.args[0]}",)
        raise


def write_history_csv(path, history):
    write_table(path, ("iter", "J", "delta", "eta_r_norm"),
                ((i, j, d, e) for i, (j, d, e) in enumerate(history)))


def write_sweep_csv(path, sweep):
    write_table(path, ("epsilon", "delta"), sweep.rows())


def write_ensemble_csv(path, stats):
    write_table(path, ("epsilon", "fidelity", "x", "y", "z"), stats.rows())
