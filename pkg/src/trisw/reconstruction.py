"""Piecewise-linear reconstruction with weighted gradients and a
depth-positivity correction of the free surface.

All functions are vectorised over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import DRY_DEPTH, GRADIENT_XI


class DegenerateStencilError(ValueError):
    """The three stencil centroids are (numerically) collinear."""


@dataclass(eq=False)
class CellStateField:
    """Cell averages of free surface ``w`` and discharges ``qx``, ``qy``."""

    w: np.ndarray
    qx: np.ndarray
    qy: np.ndarray

    def copy(self) -> "CellStateField":
        return CellStateField(self.w.copy(), self.qx.copy(), self.qy.copy())

    def depth(self, cell_b) -> np.ndarray:
        return self.w - cell_b

    def stacked(self) -> np.ndarray:
        return np.stack([self.w, self.qx, self.qy], axis=-1)


@dataclass(eq=False)
class GradientField:
    """Limited gradients, shape (nc, 3 variables, 2); plus the unlimited ones."""

    limited: np.ndarray
    unlimited: np.ndarray
    valid: np.ndarray


@dataclass(eq=False)
class InterfaceStates:
    """Reconstructed values at edge midpoints, each array (nc, 3 edges).

    ``inner`` is the cell's own side, ``outer`` the neighbour's side (or the
    boundary ghost state). Keys: w, h, qx, qy, u, v.
    """

    inner: dict
    outer: dict


def plane_gradient(c1, c2, c3, rel_tol: float = 1e-14):
    """Gradient of the plane through three (x, y, value) points.

    Raises DegenerateStencilError when the points are collinear.
    """
    (x1, y1, u1), (x2, y2, u2), (x3, y3, u3) = c1, c2, c3
    gx, gy, ok = plane_gradients(np.array([x1, x2, x3], float), np.array([y1, y2, y3], float),
                                 np.array([u1, u2, u3], float), rel_tol)
    if not ok:
        raise DegenerateStencilError("stencil centroids are collinear")
    return float(gx), float(gy)


def stencil_determinant(xs, ys, rel_tol: float = 1e-14):
    """Denominator of the plane gradient and whether it is usable.

    ``xs``, ``ys`` have the three stencil points on the last axis.
    """
    dx2 = xs[..., 1] - xs[..., 0]
    dx3 = xs[..., 2] - xs[..., 0]
    dy2 = ys[..., 1] - ys[..., 0]
    dy3 = ys[..., 2] - ys[..., 0]
    det = dy3 * dx2 - dy2 * dx3
    scale = np.maximum(dx2 * dx2 + dy2 * dy2, dx3 * dx3 + dy3 * dy3)
    return det, np.abs(det) > rel_tol * scale


def plane_gradients(xs, ys, us, rel_tol: float = 1e-14):
    """Vectorised plane gradient; returns (gx, gy, valid). Invalid entries are 0."""
    det, ok = stencil_determinant(xs, ys, rel_tol)
    safe = np.where(ok, det, 1.0)
    gx, gy = _plane_from_det(xs, ys, us, safe)
    return np.where(ok, gx, 0.0), np.where(ok, gy, 0.0), ok


def _plane_from_det(xs, ys, us, det):
    du2 = us[..., 1] - us[..., 0]
    du3 = us[..., 2] - us[..., 0]
    gx = ((ys[..., 2] - ys[..., 0]) * du2 - (ys[..., 1] - ys[..., 0]) * du3) / det
    gy = ((xs[..., 1] - xs[..., 0]) * du3 - (xs[..., 2] - xs[..., 0]) * du2) / det
    return gx, gy


def weighted_gradient(g1, g2, g3, xi: float = GRADIENT_XI):
    """Combine three stencil gradients (last axis = x, y) with weights that
    favour the smoother stencils.

    Each weight is the product of the *other two* squared norms plus xi^2,
    over the sum of fourth powers plus 3 xi^2. Equal inputs come back unchanged.
    """
    g1, g2, g3 = (np.asarray(g, dtype=float) for g in (g1, g2, g3))
    n1 = g1[..., 0] * g1[..., 0] + g1[..., 1] * g1[..., 1]
    n2 = g2[..., 0] * g2[..., 0] + g2[..., 1] * g2[..., 1]
    n3 = g3[..., 0] * g3[..., 0] + g3[..., 1] * g3[..., 1]
    xi2 = xi * xi
    denom = n1 * n1 + n2 * n2 + n3 * n3 + 3.0 * xi2
    w1 = (n2 * n3 + xi2) / denom
    w2 = (n3 * n1 + xi2) / denom
    w3 = (n1 * n2 + xi2) / denom
    return w1[..., None] * g1 + w2[..., None] * g2 + w3[..., None] * g3


def positivity_correct(w_vertex, b_vertex, h_mean):
    """Clamp reconstructed vertex surface values to the bed while keeping the
    cell-mean depth.

    Vertices with ``w < B`` are set to ``B``; the others get a common depth
    ``3 * h_mean / n_plus``. Dry rows (``h_mean <= 0``) lie exactly on the bed.
    Wet rows without a violation are returned unchanged. Returns ``(w_corrected, corrected_mask)``.
    """
    w_vertex = np.asarray(w_vertex, dtype=float)
    b_vertex = np.asarray(b_vertex, dtype=float)
    h_mean = np.asarray(h_mean, dtype=float)
    below = w_vertex < b_vertex
    # a dry cell with all vertices at or above the bed can only be on the bed;
    # snapping removes roundoff-thin films at its interfaces
    needs = below.any(axis=-1) | (h_mean <= 0.0)
    if not needs.any():
        return w_vertex.copy(), needs
    n_plus = 3 - below.sum(axis=-1)
    dry_all = needs & (n_plus == 0)
    if dry_all.any():
        # only reachable through roundoff: the vertex mean of w - B is h_mean >= 0
        scale = np.maximum(np.abs(w_vertex).max(axis=-1), np.abs(b_vertex).max(axis=-1))
        bad = dry_all & (h_mean > 64 * np.finfo(float).eps * np.maximum(scale, 1.0))
        if bad.any():
            idx = np.flatnonzero(np.ravel(bad))[0]
            raise AssertionError(
                f"positivity correction: all vertices below bed with positive mean depth "
                f"{np.ravel(h_mean)[idx]!r} (row {idx})")
    h_tilde = 3.0 * h_mean / np.where(n_plus > 0, n_plus, 1)
    h_tilde = np.where(n_plus > 0, h_tilde, 0.0)
    corrected = np.where(below, b_vertex, h_tilde[..., None] + b_vertex)
    return np.where(needs[..., None], corrected, w_vertex), needs


def desingularized_velocity(h, qx, qy, eps, eta: float = DRY_DEPTH):
    """Velocity ``q / h`` that stays bounded as ``h -> 0``.

    For ``h < eta`` uses ``sqrt(2) h q / sqrt(h^4 + max(h^4, eps))``.
    """
    h = np.asarray(h, dtype=float)
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    wet = h >= eta
    h4 = h * h * h * h
    den = np.sqrt(h4 + np.maximum(h4, eps))
    factor = np.where(wet, 1.0 / np.where(wet, h, 1.0),
                      np.sqrt(2.0) * h / np.where(den > 0, den, 1.0))
    return factor * qx, factor * qy


def cell_gradients(disc, ext: np.ndarray) -> GradientField:
    """Unlimited stencil gradients per cell and their weighted combination.

    ``ext`` holds (nc + nb, 3) values: cell means followed by boundary ghost
    means. A cell's unlimited gradient is the plane through its three
    neighbour (or ghost) centroids; the limited gradient weights the unlimited
    gradients of the three neighbours, with a ghost neighbour contributing the
    cell's own unlimited gradient. Cells flagged ``disc.transmissive`` use
    the bed gradient for w and zero for the discharges.
    """
    vals = ext[disc.stencil_idx]  # (nc, 3 stencil, 3 vars)
    xs = disc.stencil_xy[..., 0][:, None, :]
    ys = disc.stencil_xy[..., 1][:, None, :]
    us = np.swapaxes(vals, 1, 2)  # (nc, vars, stencil)
    gx, gy = _plane_from_det(xs, ys, us, disc.stencil_det_safe[:, None])
    ok = disc.stencil_ok
    unlimited = np.stack([gx, gy], axis=-1)
    unlimited[~ok] = 0.0

    nbr = disc.neighbor
    use_nbr = (nbr >= 0) & ok[np.maximum(nbr, 0)]
    src = np.where(use_nbr, nbr, np.arange(len(nbr))[:, None])
    g = unlimited[src]  # (nc, 3 stencil, vars, 2)
    limited = weighted_gradient(g[:, 0], g[:, 1], g[:, 2])
    limited[~ok] = 0.0
    tc = disc.transmissive
    limited[tc, 0] = disc.bathymetry.gradient[tc]
    limited[tc, 1:] = 0.0
    return GradientField(limited, unlimited, ok)


def interface_values(disc, state: CellStateField, grads: GradientField):
    """Inner-side midpoint states of every cell edge after the positivity fix.

    Returns a dict of (nc, 3) arrays w, h, qx, qy, u, v.
    """
    bath = disc.bathymetry
    gw = grads.limited[:, 0]
    off_v = disc.cell_vertices - disc.centroid[:, None, :]
    off_m = disc.midpoint - disc.centroid[:, None, :]

    w_v = state.w[:, None] + gw[:, None, 0] * off_v[..., 0] + gw[:, None, 1] * off_v[..., 1]
    h_mean = state.w - bath.cell
    w_corr, fixed = positivity_correct(w_v, bath.cell_vertex, h_mean)
    w_lin = state.w[:, None] + gw[:, None, 0] * off_m[..., 0] + gw[:, None, 1] * off_m[..., 1]
    w_avg = 0.5 * (w_corr + np.roll(w_corr, -1, axis=1))
    w_mid = np.where(fixed[:, None], w_avg, w_lin)

    q = []
    for var, mean in ((1, state.qx), (2, state.qy)):
        g = grads.limited[:, var]
        q.append(mean[:, None] + g[:, None, 0] * off_m[..., 0] + g[:, None, 1] * off_m[..., 1])
    return finish_interface(w_mid, bath.edge, q[0], q[1], disc.eps)


def finish_interface(w, b_edge, qx, qy, eps):
    """Depth, velocities and discharges consistent at a set of midpoint states.

    Below the dry threshold the discharge is recomputed as ``h * u`` so the
    mass flux stays bounded by the local speeds.
    """
    h = np.maximum(w - b_edge, 0.0)
    u, v = desingularized_velocity(h, qx, qy, eps)
    thin = h < DRY_DEPTH
    qx = np.where(thin, h * u, qx)
    qy = np.where(thin, h * v, qy)
    return {"w": w, "h": h, "qx": qx, "qy": qy, "u": u, "v": v}


def reconstruct(disc, state: CellStateField, t: float = 0.0):
    """Gradients and interface states (both sides) for ``state`` at time ``t``.

    ``disc`` is a :class:`trisw.stepper.Discretization`; its boundary
    conditions provide the ghost values.
    """
    from .boundary import ghost_means, ghost_interface

    kinds, presc = disc.boundary_data(t)
    ext = np.concatenate([state.stacked(), ghost_means(disc, state, kinds, presc)])
    grads = cell_gradients(disc, ext)
    inner = interface_values(disc, state, grads)
    outer = {k: np.zeros_like(v) for k, v in inner.items()}
    nbr = disc.neighbor
    interior = nbr >= 0
    for key in inner:
        outer[key][interior] = inner[key][nbr[interior], disc.neighbor_edge[interior]]
    gi = ghost_interface(disc, inner, kinds, presc)
    for key in inner:
        outer[key][disc.b_cell, disc.b_edge] = gi[key]
    return grads, InterfaceStates(inner, outer)
