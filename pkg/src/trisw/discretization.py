"""Flat, contiguous arrays describing one (mesh, bathymetry, boundary) setup.

Both residual backends read only from this object.
"""
from __future__ import annotations

import numpy as np

from .bathymetry import BathymetryField
from .boundary import OUTFLOW, BoundaryCondition
from .mesh import Mesh
from .reconstruction import stencil_determinant


class Discretization:
    def __init__(self, mesh: Mesh, bathymetry: BathymetryField,
                 bcs: dict[str, BoundaryCondition]):
        self.mesh = mesh
        self.bathymetry = bathymetry
        self.bcs = dict(bcs)

        nc = mesh.n_cells
        self.n_cells = nc
        self.area = mesh.area
        self.centroid = mesh.centroid
        self.cell_vertices = mesh.cell_vertices
        self.edge_length = mesh.edge_length
        self.normal = mesh.normal
        self.midpoint = mesh.midpoint
        self.neighbor = mesh.neighbor
        self.neighbor_edge = mesh.neighbor_edge
        self.inradius = mesh.inradius
        # one global desingularisation scale, shared by velocities and friction
        self.eps = float(np.max(mesh.area) ** 2)

        bnd = mesh.boundary_edges()
        self.n_boundary = len(bnd)
        self.b_cell = np.array([c for c, _, _ in bnd], dtype=np.intp)
        self.b_edge = np.array([k for _, k, _ in bnd], dtype=np.intp)
        self.b_tags = [t for _, _, t in bnd]
        missing = sorted({t for t in self.b_tags if t not in self.bcs} - {"*"})
        if missing and "*" not in self.bcs:
            raise ValueError(f"no boundary condition for tag(s) {missing}")
        self.tag_names = sorted(set(self.b_tags))
        self.b_tag_index = np.array([self.tag_names.index(t) for t in self.b_tags], dtype=np.intp)
        self.b_normal = np.ascontiguousarray(self.normal[self.b_cell, self.b_edge])
        self.boundary_slot = np.full((nc, 3), -1, dtype=np.intp)
        self.boundary_slot[self.b_cell, self.b_edge] = np.arange(self.n_boundary)

        # ghost centroid: reflection of the cell centroid across the edge line
        c = self.centroid[self.b_cell]
        off = self.midpoint[self.b_cell, self.b_edge] - c
        dist = off[:, 0] * self.b_normal[:, 0] + off[:, 1] * self.b_normal[:, 1]
        self.ghost_xy = c + 2.0 * dist[:, None] * self.b_normal
        grad_b = bathymetry.gradient[self.b_cell]
        self.ghost_b = bathymetry.cell[self.b_cell] + 2.0 * dist * (
            grad_b[:, 0] * self.b_normal[:, 0] + grad_b[:, 1] * self.b_normal[:, 1])

        nbr = self.neighbor
        self.stencil_idx = np.where(nbr >= 0, nbr, nc + self.boundary_slot)
        xy_all = np.concatenate([self.centroid, self.ghost_xy])
        self.stencil_xy = np.ascontiguousarray(xy_all[self.stencil_idx])
        det, ok = stencil_determinant(self.stencil_xy[..., 0], self.stencil_xy[..., 1])
        self.stencil_det = det
        self.stencil_ok = ok
        self.stencil_det_safe = np.where(ok, det, 1.0)

        # cells touching a transmissive edge get a constant-depth reconstruction
        # (w follows the bed, q flat); a sloped reconstruction there feeds
        # downstream data back through the copied ghost and amplifies roundoff
        codes = np.array([self.bc_for(t).code for t in self.b_tags], dtype=np.intp)
        self.transmissive = np.zeros(nc, dtype=bool)
        self.transmissive[self.b_cell[codes == OUTFLOW]] = True

        ci, ki = np.nonzero((nbr >= 0) & (nbr > np.arange(nc)[:, None]))
        self.e_left = ci.astype(np.intp)
        self.e_left_k = ki.astype(np.intp)
        self.e_right = nbr[ci, ki].astype(np.intp)
        self.e_right_k = self.neighbor_edge[ci, ki].astype(np.intp)

    def bc_for(self, tag: str) -> BoundaryCondition:
        return self.bcs.get(tag, self.bcs.get("*"))

    def boundary_data(self, t: float):
        """Per boundary edge: kind codes (nb,) and prescribed (w, u, v) (nb, 3)."""
        codes = np.empty(len(self.tag_names), dtype=np.intp)
        values = np.zeros((len(self.tag_names), 3))
        for i, tag in enumerate(self.tag_names):
            bc = self.bc_for(tag)
            codes[i] = bc.code
            values[i] = bc.prescribed(t)
        return codes[self.b_tag_index], np.ascontiguousarray(values[self.b_tag_index])

    def wall_only(self) -> bool:
        return all(self.bc_for(t).kind == "wall" for t in self.tag_names)
