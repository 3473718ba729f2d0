"""Vertex-based bottom topography and the values derived from it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh


class InvalidBathymetryError(ValueError):
    pass


@dataclass(eq=False)
class BathymetryField:
    """Elevations at vertices, edge midpoints (per cell, local edge) and cell means.

    Midpoint and cell values are linear averages of the vertex values, so the
    edge value is identical when seen from either cell sharing the edge.
    """

    vertex: np.ndarray
    edge: np.ndarray
    cell: np.ndarray
    # per-cell plane gradient of the bed, (nc, 2)
    gradient: np.ndarray
    # bed at each cell's three vertices, (nc, 3)
    cell_vertex: np.ndarray


def from_vertex_values(mesh: Mesh, values) -> BathymetryField:
    vb = np.ascontiguousarray(values, dtype=np.float64)
    if vb.shape != (mesh.n_vertices,):
        raise InvalidBathymetryError(
            f"expected {mesh.n_vertices} vertex elevations, got shape {vb.shape}")
    if not np.all(np.isfinite(vb)):
        bad = int(np.flatnonzero(~np.isfinite(vb))[0])
        raise InvalidBathymetryError(f"non-finite elevation at vertex {bad}")
    tri = mesh.triangles
    cv = vb[tri]
    edge = (cv + np.roll(cv, -1, axis=1)) / 2
    cell = (cv[:, 0] + cv[:, 1] + cv[:, 2]) / 3
    return BathymetryField(vb, edge, cell, _plane_gradient(mesh, cv), cv)


def sample_bathymetry(mesh: Mesh, b) -> BathymetryField:
    """Evaluate ``b(x, y)`` at the vertices and derive the rest.

    ``b`` may be vectorised; scalar callables are evaluated point by point.
    """
    x, y = mesh.points[:, 0], mesh.points[:, 1]
    try:
        values = np.broadcast_to(np.asarray(b(x, y), dtype=float), x.shape).copy()
    except (TypeError, ValueError):
        values = np.array([float(b(xi, yi)) for xi, yi in zip(x, y)])
    return from_vertex_values(mesh, values)


def from_mesh(mesh: Mesh) -> BathymetryField:
    """Use the elevation column that came with the mesh file."""
    return from_vertex_values(mesh, mesh.vertex_z)


def interface_value(field: BathymetryField, cell: int, edge: int) -> float:
    return float(field.edge[cell, edge])


def _plane_gradient(mesh: Mesh, cv: np.ndarray) -> np.ndarray:
    v = mesh.cell_vertices
    dx1 = v[:, 1, 0] - v[:, 0, 0]
    dy1 = v[:, 1, 1] - v[:, 0, 1]
    dx2 = v[:, 2, 0] - v[:, 0, 0]
    dy2 = v[:, 2, 1] - v[:, 0, 1]
    db1 = cv[:, 1] - cv[:, 0]
    db2 = cv[:, 2] - cv[:, 0]
    det = dx1 * dy2 - dx2 * dy1
    gx = (db1 * dy2 - db2 * dy1) / det
    gy = (dx1 * db2 - dx2 * db1) / det
    return np.column_stack([gx, gy])
