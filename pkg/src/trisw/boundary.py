"""Boundary conditions and the ghost values they induce.

Two kinds of ghost data are needed per boundary edge: a ghost *cell mean*
at the centroid mirrored across the edge (it closes the gradient stencil of
boundary cells) and a ghost *interface state* facing the cell's own midpoint
state (it enters the edge flux).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .reconstruction import finish_interface

WALL, OUTFLOW, INFLOW = 0, 1, 2
KINDS = ("wall", "outflow", "inflow_series", "inflow_analytic")


@dataclass
class BoundaryCondition:
    """``kind`` is one of wall, outflow, inflow_series, inflow_analytic.

    Inflow kinds prescribe ``(w, u, v)``: from ``series = (t, w, u, v)``
    arrays (linear interpolation, clamped at both ends) or from
    ``forcing(t) -> (elevation, u, v)``; the forcing elevation is measured
    from ``datum`` (the still-water level).
    """

    kind: str
    series: tuple | None = None
    forcing: Callable | None = None
    datum: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "inflow_series":
            if self.series is None:
                raise ValueError("inflow_series needs a (t, w, u, v) series")
            t, w, u, v = (np.asarray(a, dtype=float) for a in self.series)
            if not (len(t) == len(w) == len(u) == len(v)) or len(t) == 0:
                raise ValueError("series columns must be non-empty and of equal length")
            if np.any(np.diff(t) <= 0):
                raise ValueError("series times must be strictly increasing")
            self.series = (t, w, u, v)
        if self.kind == "inflow_analytic" and self.forcing is None:
            raise ValueError("inflow_analytic needs a forcing function")

    @property
    def code(self) -> int:
        if self.kind == "wall":
            return WALL
        if self.kind == "outflow":
            return OUTFLOW
        return INFLOW

    def prescribed(self, t: float) -> tuple[float, float, float]:
        if self.kind == "inflow_series":
            ts, w, u, v = self.series
            return (float(np.interp(t, ts, w)), float(np.interp(t, ts, u)),
                    float(np.interp(t, ts, v)))
        if self.kind == "inflow_analytic":
            eta, u, v = self.forcing(t)
            return self.datum + float(eta), float(u), float(v)
        return 0.0, 0.0, 0.0


def ghost_means(disc, state, kinds, presc) -> np.ndarray:
    """Ghost cell means (nb, 3) at the mirrored centroids."""
    c = disc.b_cell
    n = disc.b_normal
    w = state.w[c]
    qx = state.qx[c]
    qy = state.qy[c]

    qn = qx * n[:, 0] + qy * n[:, 1]
    wall = np.stack([w, qx - 2.0 * qn * n[:, 0], qy - 2.0 * qn * n[:, 1]], axis=-1)
    out = np.stack([(w - disc.bathymetry.cell[c]) + disc.ghost_b, qx, qy], axis=-1)
    wp = np.maximum(presc[:, 0], disc.ghost_b)
    hp = wp - disc.ghost_b
    inflow = np.stack([wp, hp * presc[:, 1], hp * presc[:, 2]], axis=-1)

    k = kinds[:, None]
    return np.where(k == WALL, wall, np.where(k == OUTFLOW, out, inflow))


def _outer_states(inner, kinds, presc, nx, ny, b_edge, eps):
    w, h = inner["w"], inner["h"]
    qx, qy, u, v = inner["qx"], inner["qy"], inner["u"], inner["v"]
    qn = qx * nx + qy * ny
    un = u * nx + v * ny
    wall = {"w": w, "h": h, "qx": qx - 2.0 * qn * nx, "qy": qy - 2.0 * qn * ny,
            "u": u - 2.0 * un * nx, "v": v - 2.0 * un * ny}
    hp = np.maximum(presc[:, 0] - b_edge, 0.0)
    inflow = finish_interface(b_edge + hp, b_edge, hp * presc[:, 1], hp * presc[:, 2], eps)
    out = {}
    for key in inner:
        out[key] = np.where(kinds == WALL, wall[key],
                            np.where(kinds == OUTFLOW, inner[key], inflow[key]))
    return out


def ghost_interface(disc, inner, kinds, presc):
    """Outer midpoint states (dict of (nb,) arrays) on every boundary edge."""
    c, k = disc.b_cell, disc.b_edge
    sub = {key: val[c, k] for key, val in inner.items()}
    return _outer_states(sub, kinds, presc, disc.b_normal[:, 0], disc.b_normal[:, 1],
                         disc.bathymetry.edge[c, k], disc.eps)


def ghost_state(inner: dict, bc: BoundaryCondition, direction, t: float,
                b_edge: float, eps: float = 0.0) -> dict:
    """Outer interface state for one boundary midpoint.

    ``direction`` is the outward unit normal and ``b_edge`` the bed at the
    midpoint. Wall mirrors the normal velocity, outflow copies, inflow takes
    the prescribed surface and velocity.
    """
    arr = {key: np.atleast_1d(np.asarray(val, dtype=float)) for key, val in inner.items()}
    presc = np.atleast_2d(np.array(bc.prescribed(t), dtype=float))
    kinds = np.array([bc.code])
    out = _outer_states(arr, kinds, presc, float(direction[0]), float(direction[1]),
                        np.array([float(b_edge)]), eps)
    return {key: float(val[0]) for key, val in out.items()}
