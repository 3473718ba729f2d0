"""Conforming triangular meshes and the per-cell geometry used by the scheme.

Local edge ``k`` of a cell joins its vertices ``k`` and ``(k + 1) % 3``.
Vertices are stored counter-clockwise, so the outward normal of edge
``(p, q)`` is ``(q - p)`` rotated by -90 degrees.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class InvalidDomainError(MeshError):
    pass


class MeshParseError(MeshError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DegenerateCellError(MeshError):
    pass


class NonConformingMeshError(MeshError):
    pass


BOUNDARY_SIDES = ("left", "right", "bottom", "top")


@dataclass(eq=False)
class Mesh:
    """Triangulation plus derived geometry.

    ``points`` is (nv, 2), ``triangles`` is (nc, 3). ``vertex_z`` carries the
    bottom elevation column of the mesh file (zeros for generated meshes).
    ``boundary_tags`` maps ``(cell, local_edge)`` to a tag string for every
    edge that has no neighbour.
    """

    points: np.ndarray
    triangles: np.ndarray
    vertex_z: np.ndarray | None = None
    boundary_tags: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float64)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.intp)
        if self.vertex_z is None:
            self.vertex_z = np.zeros(len(self.points))
        else:
            self.vertex_z = np.ascontiguousarray(self.vertex_z, dtype=np.float64)
        compute_geometry(self)

    @property
    def n_cells(self) -> int:
        return len(self.triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    def boundary_edges(self) -> list[tuple[int, int, str]]:
        """Boundary edges as (cell, local edge, tag), sorted by cell then edge."""
        return [(c, k, t) for (c, k), t in sorted(self.boundary_tags.items())]

    def bounding_box(self) -> tuple[float, float, float, float]:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])


def compute_geometry(mesh: Mesh) -> Mesh:
    """Populate areas, centroids, edge geometry and neighbour topology in place.

    Clockwise triangles are flipped to counter-clockwise first.
    """
    pts = mesh.points
    tri = mesh.triangles
    if tri.ndim != 2 or tri.shape[1] != 3:
        raise MeshError("triangles must be an (n, 3) index array")
    if len(tri) == 0:
        raise MeshError("mesh has no cells")
    if tri.min() < 0 or tri.max() >= len(pts):
        raise MeshError("triangle references a vertex id out of range")
    if not np.all(np.isfinite(pts)):
        raise MeshError("non-finite vertex coordinates")

    repeated = (tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) | (tri[:, 0] == tri[:, 2])
    if repeated.any():
        bad = int(np.flatnonzero(repeated)[0])
        raise DegenerateCellError(f"cell {bad} lists a vertex twice (zero area)")

    p0, p1, p2 = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    signed = 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                    - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))
    scale = np.maximum.reduce([np.sum((p1 - p0) ** 2, axis=1),
                               np.sum((p2 - p1) ** 2, axis=1),
                               np.sum((p0 - p2) ** 2, axis=1)])
    flat = np.abs(signed) <= 1e-14 * scale
    if flat.any():
        bad = int(np.flatnonzero(flat)[0])
        raise DegenerateCellError(f"cell {bad} has zero area")
    cw = signed < 0
    if cw.any():
        tri[cw] = tri[cw][:, [0, 2, 1]]
        signed = np.abs(signed)

    verts = pts[tri]  # (nc, 3, 2)
    mesh.area = signed
    mesh.centroid = verts.mean(axis=1)
    mesh.cell_vertices = verts

    start = verts
    end = np.roll(verts, -1, axis=1)
    delta = end - start
    length = np.hypot(delta[..., 0], delta[..., 1])
    mesh.edge_length = length
    mesh.normal = np.stack([delta[..., 1] / length, -delta[..., 0] / length], axis=-1)
    mesh.midpoint = 0.5 * (start + end)
    mesh.perimeter = length.sum(axis=1)
    mesh.inradius = 2.0 * mesh.area / mesh.perimeter

    _build_topology(mesh)
    return mesh


def _build_topology(mesh: Mesh) -> None:
    tri = mesh.triangles
    nc = len(tri)
    a = tri
    b = np.roll(tri, -1, axis=1)
    lo = np.minimum(a, b).ravel()
    hi = np.maximum(a, b).ravel()
    keys = lo.astype(np.int64) * (int(tri.max()) + 1) + hi
    uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if (counts > 2).any():
        bad = uniq[np.flatnonzero(counts > 2)[0]]
        n = int(tri.max()) + 1
        raise NonConformingMeshError(
            f"edge ({bad // n}, {bad % n}) is shared by more than two cells")

    slots = np.arange(3 * nc)
    order = np.argsort(inverse, kind="stable")
    sorted_inv = inverse[order]
    neighbor = np.full(3 * nc, -1, dtype=np.intp)
    neighbor_edge = np.full(3 * nc, -1, dtype=np.intp)
    pair = np.flatnonzero(sorted_inv[1:] == sorted_inv[:-1])
    s1 = slots[order[pair]]
    s2 = slots[order[pair + 1]]
    # a shared edge must be traversed in opposite directions by its two cells
    same_dir = a.ravel()[s1] == a.ravel()[s2]
    if same_dir.any():
        raise NonConformingMeshError(
            f"cells {s1[same_dir][0] // 3} and {s2[same_dir][0] // 3} overlap "
            "(inconsistent orientation across a shared edge)")
    neighbor[s1] = s2 // 3
    neighbor[s2] = s1 // 3
    neighbor_edge[s1] = s2 % 3
    neighbor_edge[s2] = s1 % 3
    mesh.neighbor = neighbor.reshape(nc, 3)
    mesh.neighbor_edge = neighbor_edge.reshape(nc, 3)

    free = {(int(c), int(k)) for c, k in zip(*np.nonzero(mesh.neighbor < 0))}
    unknown = set(mesh.boundary_tags) - free
    if unknown:
        c, k = sorted(unknown)[0]
        raise NonConformingMeshError(f"boundary tag given for interior edge (cell {c}, edge {k})")
    missing = free - set(mesh.boundary_tags)
    if missing:
        auto = _side_tags(mesh, sorted(missing))
        mesh.boundary_tags = {**mesh.boundary_tags, **auto}


def _side_tags(mesh: Mesh, edges: list[tuple[int, int]]) -> dict[tuple[int, int], str]:
    """Tag untagged boundary edges by the bounding-box side they lie on."""
    x0, x1, y0, y1 = mesh.bounding_box()
    tol = 1e-9 * max(x1 - x0, y1 - y0)
    tags = {}
    for c, k in edges:
        p = mesh.cell_vertices[c, k]
        q = mesh.cell_vertices[c, (k + 1) % 3]
        if abs(p[0] - x0) <= tol and abs(q[0] - x0) <= tol:
            tag = "left"
        elif abs(p[0] - x1) <= tol and abs(q[0] - x1) <= tol:
            tag = "right"
        elif abs(p[1] - y0) <= tol and abs(q[1] - y0) <= tol:
            tag = "bottom"
        elif abs(p[1] - y1) <= tol and abs(q[1] - y1) <= tol:
            tag = "top"
        else:
            tag = "boundary"
        tags[(c, k)] = tag
    return tags


def generate_rect_mesh(x_range, y_range, nx: int, ny: int,
                       diagonal_pattern: str = "alternating") -> Mesh:
    """Split an ``nx`` by ``ny`` grid of rectangles into ``2 * nx * ny`` triangles.

    ``"uniform"`` draws every diagonal from lower-left to upper-right;
    ``"alternating"`` flips it in a checkerboard.
    """
    x0, x1 = map(float, x_range)
    y0, y1 = map(float, y_range)
    if not (np.isfinite([x0, x1, y0, y1]).all() and x1 > x0 and y1 > y0):
        raise InvalidDomainError(f"degenerate domain {x_range} x {y_range}")
    if int(nx) < 1 or int(ny) < 1:
        raise InvalidDomainError("nx and ny must be at least 1")
    if diagonal_pattern not in ("uniform", "alternating"):
        raise ValueError(f"unknown diagonal pattern {diagonal_pattern!r}")
    nx, ny = int(nx), int(ny)

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    points = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    a = j * (nx + 1) + i
    b = a + 1
    c = a + nx + 2
    d = a + nx + 1
    flip = ((i + j) % 2 == 1) if diagonal_pattern == "alternating" else np.zeros_like(a, bool)
    t1 = np.where(flip[:, None], np.column_stack([a, b, d]), np.column_stack([a, b, c]))
    t2 = np.where(flip[:, None], np.column_stack([b, c, d]), np.column_stack([a, c, d]))
    triangles = np.empty((2 * len(a), 3), dtype=np.intp)
    triangles[0::2] = t1
    triangles[1::2] = t2
    return Mesh(points, triangles)


def locate_cell(mesh: Mesh, point, tol: float = 1e-12) -> int | None:
    """Lowest id of a cell whose closed triangle contains ``point``, else None."""
    px, py = float(point[0]), float(point[1])
    v = mesh.cell_vertices
    inside = np.ones(mesh.n_cells, dtype=bool)
    for k in range(3):
        p = v[:, k]
        q = v[:, (k + 1) % 3]
        cross = (q[:, 0] - p[:, 0]) * (py - p[:, 1]) - (q[:, 1] - p[:, 1]) * (px - p[:, 0])
        inside &= cross >= -tol * mesh.edge_length[:, k] * (1.0 + np.abs(p).max(axis=1))
    hits = np.flatnonzero(inside)
    return int(hits[0]) if len(hits) else None


def save_mesh(mesh: Mesh, path, vertex_z=None) -> None:
    """Write the line-oriented text format (round-trip float precision)."""
    z = mesh.vertex_z if vertex_z is None else np.asarray(vertex_z, dtype=float)
    with open(path, "w") as fh:
        fh.write("# NV NT\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_cells}\n")
        for (x, y), b in zip(mesh.points, z):
            fh.write(f"{float(x)!r} {float(y)!r} {float(b)!r}\n")
        for t in mesh.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")
        fh.write("boundary\n")
        for c, k, tag in mesh.boundary_edges():
            fh.write(f"{c} {k} {tag}\n")


def load_mesh(path: str | os.PathLike) -> Mesh:
    """Parse a mesh file; see ``save_mesh`` for the layout."""
    with open(path) as fh:
        raw = fh.readlines()
    lines = []
    for n, text in enumerate(raw, start=1):
        text = text.split("#", 1)[0].strip()
        if text:
            lines.append((n, text.split()))
    if not lines:
        raise MeshParseError("empty mesh file")

    it = iter(lines)
    n, tok = next(it)
    try:
        nv, nt = int(tok[0]), int(tok[1])
        if len(tok) != 2 or nv < 3 or nt < 1:
            raise ValueError
    except (ValueError, IndexError):
        raise MeshParseError("header must be 'NV NT' with NV >= 3, NT >= 1", n) from None

    points = np.empty((nv, 2))
    z = np.empty(nv)
    for i in range(nv):
        n, tok = _next_line(it, "vertex", i)
        try:
            if len(tok) != 3:
                raise ValueError
            points[i] = float(tok[0]), float(tok[1])
            z[i] = float(tok[2])
        except ValueError:
            raise MeshParseError("vertex line must be 'x y B'", n) from None
    tris = np.empty((nt, 3), dtype=np.intp)
    for i in range(nt):
        n, tok = _next_line(it, "triangle", i)
        try:
            if len(tok) != 3:
                raise ValueError
            tris[i] = [int(t) for t in tok]
        except ValueError:
            raise MeshParseError("triangle line must be 'i1 i2 i3'", n) from None
        if tris[i].min() < 0 or tris[i].max() >= nv:
            raise MeshParseError(f"vertex id out of range 0..{nv - 1}", n)

    tags = {}
    rest = list(it)
    if rest:
        n, tok = rest[0]
        if tok != ["boundary"]:
            raise MeshParseError("expected 'boundary' section or end of file", n)
        for n, tok in rest[1:]:
            try:
                c, k, tag = int(tok[0]), int(tok[1]), tok[2]
                if len(tok) != 3 or not (0 <= c < nt and 0 <= k < 3):
                    raise ValueError
            except (ValueError, IndexError):
                raise MeshParseError("boundary line must be 'cell edge tag'", n) from None
            tags[(c, k)] = tag

    # tags refer to the file's vertex order; remap edges of cells flipped to CCW
    flipped = _clockwise(points, tris)
    if tags and flipped.any():
        remap = {0: 2, 1: 1, 2: 0}  # (a,b,c) -> (a,c,b): edge a-b becomes edge 2, etc.
        tags = {(c, remap[k] if flipped[c] else k): t for (c, k), t in tags.items()}
    return Mesh(points, tris, vertex_z=z, boundary_tags=tags)


def _clockwise(points, tris):
    p0, p1, p2 = points[tris[:, 0]], points[tris[:, 1]], points[tris[:, 2]]
    return ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
            - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1])) < 0


def _next_line(it, what, i):
    try:
        return next(it)
    except StopIteration:
        raise MeshParseError(f"file ended before {what} {i}") from None
