"""File formats: snapshots (CSV, legacy VTK ASCII), gauge CSVs, forcing series."""
from __future__ import annotations

import csv
import os

import numpy as np

SNAPSHOT_COLUMNS = ("cell_id", "x", "y", "B", "w", "h", "qx", "qy")
GAUGE_COLUMNS = ("t", "w", "h", "u", "v")


class SeriesFormatError(ValueError):
    pass


def _f(x) -> str:
    # shortest repr that round-trips a float64
    return repr(float(x))


def write_snapshot(state, mesh, bathymetry, path, format: str = "csv") -> str:
    """Write cell-mean fields; ``format`` is ``csv`` or ``vtk_ascii``."""
    b = bathymetry.cell
    h = np.maximum(state.w - b, 0.0)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            fh.write(",".join(SNAPSHOT_COLUMNS) + "\n")
            for j in range(mesh.n_cells):
                x, y = mesh.centroid[j]
                fh.write(",".join([str(j), _f(x), _f(y), _f(b[j]), _f(state.w[j]), _f(h[j]),
                                   _f(state.qx[j]), _f(state.qy[j])]) + "\n")
    elif format == "vtk_ascii":
        _write_vtk(path, mesh, {"B": b, "w": state.w, "h": h, "qx": state.qx, "qy": state.qy})
    else:
        raise ValueError(f"unknown snapshot format {format!r}; use 'csv' or 'vtk_ascii'")
    return str(path)


def _write_vtk(path, mesh, fields: dict) -> None:
    nv, nc = mesh.n_vertices, mesh.n_cells
    lines = ["# vtk DataFile Version 3.0", "trisw snapshot", "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {nv} double"]
    lines += [f"{_f(x)} {_f(y)} 0.0" for x, y in mesh.points]
    lines.append(f"CELLS {nc} {4 * nc}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"CELL_TYPES {nc}")
    lines += ["5"] * nc
    lines.append(f"CELL_DATA {nc}")
    for name, values in fields.items():
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [_f(v) for v in values]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot(path) -> dict:
    """Columns of a snapshot CSV as arrays (``cell_id`` as int)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SNAPSHOT_COLUMNS:
            raise ValueError(f"unexpected snapshot header {header}")
        rows = list(reader)
    data = np.array(rows, dtype=float).reshape(-1, len(SNAPSHOT_COLUMNS))
    out = {name: data[:, i] for i, name in enumerate(SNAPSHOT_COLUMNS)}
    out["cell_id"] = out["cell_id"].astype(np.intp)
    return out


def write_gauge_csv(path, rows) -> str:
    """``rows`` is an iterable of ``(t, w, h, u, v)``."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(GAUGE_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_f(v) for v in row) + "\n")
    return str(path)


def read_gauge_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def read_series_csv(path):
    """Measured forcing ``t,w,u[,v]`` -> ``(t, w, u, v)`` arrays; ``v`` defaults to 0."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"series file not found: {path}")
    with open(path, newline="") as fh:
        lines = [(i + 1, ln.strip()) for i, ln in enumerate(fh)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise SeriesFormatError(f"{path}: empty series")
    header = [c.strip() for c in lines[0][1].split(",")]
    if header not in (["t", "w", "u"], ["t", "w", "u", "v"]):
        raise SeriesFormatError(f"{path}: line {lines[0][0]}: header must be t,w,u[,v], got {header}")
    rows = []
    for lineno, ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise SeriesFormatError(f"{path}: line {lineno}: expected {len(header)} values")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise SeriesFormatError(f"{path}: line {lineno}: not a number: {ln!r}") from None
        if not all(np.isfinite(vals)):
            raise SeriesFormatError(f"{path}: line {lineno}: non-finite value")
        rows.append(vals)
    if not rows:
        raise SeriesFormatError(f"{path}: no data rows")
    data = np.array(rows)
    t = data[:, 0]
    bad = np.flatnonzero(np.diff(t) <= 0)
    if bad.size:
        raise SeriesFormatError(f"{path}: line {lines[bad[0] + 2][0]}: times must be strictly increasing")
    v = data[:, 3] if data.shape[1] == 4 else np.zeros_like(t)
    return t, data[:, 1], data[:, 2], v
