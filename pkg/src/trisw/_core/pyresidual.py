"""Vectorised numpy residual; the fallback when the compiled kernel is absent."""
from __future__ import annotations

import numpy as np

from ..boundary import ghost_interface, ghost_means
from ..constants import GRAVITY
from ..flux import central_upwind_flux, local_speeds
from ..reconstruction import CellStateField, cell_gradients, interface_values
from ..sources import bed_slope_source


def residual(disc, w, qx, qy, kinds, presc, g: float = GRAVITY):
    """Flux divergence ``pi`` (nc, 3), bed sources ``s2``, ``s3`` and the
    largest one-sided speed on each cell's edges."""
    state = CellStateField(w, qx, qy)
    ext = np.concatenate([state.stacked(), ghost_means(disc, state, kinds, presc)])
    grads = cell_gradients(disc, ext)
    inner = interface_values(disc, state, grads)
    bath = disc.bathymetry
    s2, s3 = bed_slope_source(disc.area, disc.edge_length, disc.normal, bath.edge, bath.cell,
                              inner["w"], grads.limited[:, 0], w, g)

    nc = disc.n_cells
    slot = np.zeros((nc, 3, 3))
    smax = np.zeros((nc, 3))

    lc, lk, rc, rk = disc.e_left, disc.e_left_k, disc.e_right, disc.e_right_k
    s_in = {key: val[lc, lk] for key, val in inner.items()}
    s_out = {key: val[rc, rk] for key, val in inner.items()}
    n = disc.normal[lc, lk]
    b_in, b_out = local_speeds(s_in, s_out, n[:, 0], n[:, 1], g)
    flux = disc.edge_length[lc, lk][:, None] * central_upwind_flux(
        s_in, s_out, b_in, b_out, n[:, 0], n[:, 1], g)
    slot[lc, lk] = flux
    slot[rc, rk] = -flux
    a = np.maximum(b_in, b_out)
    smax[lc, lk] = a
    smax[rc, rk] = a

    bc, bk = disc.b_cell, disc.b_edge
    s_in = {key: val[bc, bk] for key, val in inner.items()}
    s_out = ghost_interface(disc, inner, kinds, presc)
    n = disc.b_normal
    b_in, b_out = local_speeds(s_in, s_out, n[:, 0], n[:, 1], g)
    slot[bc, bk] = disc.edge_length[bc, bk][:, None] * central_upwind_flux(
        s_in, s_out, b_in, b_out, n[:, 0], n[:, 1], g)
    smax[bc, bk] = np.maximum(b_in, b_out)

    pi = (slot[:, 0] + slot[:, 1] + slot[:, 2]) / disc.area[:, None]
    amax = np.maximum(np.maximum(smax[:, 0], smax[:, 1]), smax[:, 2])
    return pi, s2, s3, amax
