"""Bed-slope and Manning friction source terms."""
from __future__ import annotations

import numpy as np

from .constants import GRAVITY


def bed_slope_source(area, edge_length, normal, b_edge, b_cell, w_mid, grad_w, w_mean,
                     g: float = GRAVITY):
    """Well-balanced bed-slope source ``(S2, S3)`` per cell.

    ``w_mid`` are the (corrected) inner midpoint surface values, (nc, 3);
    ``grad_w`` the limited surface gradient, (nc, 2).
    """
    d2 = (b_edge - w_mid) ** 2
    t = g * edge_length * d2
    tx = t * normal[..., 0]
    ty = t * normal[..., 1]
    sx = (tx[:, 0] + tx[:, 1] + tx[:, 2]) / (2.0 * area)
    sy = (ty[:, 0] + ty[:, 1] + ty[:, 2]) / (2.0 * area)
    dh = b_cell - w_mean
    return sx + g * grad_w[:, 0] * dh, sy + g * grad_w[:, 1] * dh


def friction_phi(h, qx, qy, n_f, eps, g: float = GRAVITY):
    """Semi-implicit Manning coefficient, desingularised for thin layers.

    Equals ``g n_f^2 |q| / (2 h^(7/3))`` once ``h^4 >= eps`` and vanishes as
    ``h -> 0``.
    """
    h = np.maximum(np.asarray(h, dtype=float), 0.0)
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    h4 = h * h * h * h
    denom = h4 + np.maximum(h4, eps)
    mag = np.sqrt(qx * qx + qy * qy)
    num = g * n_f * n_f * np.power(h, 5.0 / 3.0) * mag
    return np.where(denom > 0, num / np.where(denom > 0, denom, 1.0), 0.0)


def semi_implicit_discharge_update(q, dt, phi, flux_sum, source):
    """Forward-Euler discharge update with the friction taken half implicitly."""
    return (q * (1.0 - dt * phi) + dt * flux_sum + dt * source) / (1.0 + dt * phi)
