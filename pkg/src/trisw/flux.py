"""Physical fluxes, one-sided local speeds and the central-upwind edge flux.

Interface states are dicts of arrays with keys w, h, qx, qy, u, v (see
``reconstruction.finish_interface``).
"""
from __future__ import annotations

import numpy as np

from .constants import GRAVITY, MIN_SPEED_SUM
from .reconstruction import finish_interface


def normal_flux(state, nx, ny, g: float = GRAVITY):
    """``nx * F + ny * G`` for a midpoint state; last axis is (w, qx, qy)."""
    h, qx, qy = state["h"], state["qx"], state["qy"]
    un = state["u"] * nx + state["v"] * ny
    p = 0.5 * g * h * h
    return np.stack([qx * nx + qy * ny, qx * un + p * nx, qy * un + p * ny], axis=-1)


def physical_flux(w, b, qx, qy, direction, eps: float = 0.0, g: float = GRAVITY):
    """Projected flux of a single state with bed elevation ``b``."""
    h = np.asarray(w, dtype=float) - b
    if np.any(h < 0):
        raise ValueError(f"negative depth {np.min(h)!r} in physical_flux")
    nx, ny = direction
    if nx == 0 and ny == 0:
        raise ValueError("direction must be a unit normal")
    state = finish_interface(np.asarray(w, float), b, np.asarray(qx, float),
                             np.asarray(qy, float), eps)
    return normal_flux(state, nx, ny, g)


def local_speeds(state_in, state_out, nx, ny, g: float = GRAVITY):
    """``(b_in, b_out)`` from the smallest and largest eigenvalues of both sides."""
    lam_in = state_in["u"] * nx + state_in["v"] * ny
    lam_out = state_out["u"] * nx + state_out["v"] * ny
    c_in = np.sqrt(g * state_in["h"])
    c_out = np.sqrt(g * state_out["h"])
    b_in = -np.minimum(np.minimum(lam_in - c_in, lam_out - c_out), 0.0)
    b_out = np.maximum(np.maximum(lam_in + c_in, lam_out + c_out), 0.0)
    return b_in, b_out


def central_upwind_flux(state_in, state_out, b_in, b_out, nx, ny, g: float = GRAVITY):
    """Edge flux ``A`` (last axis w, qx, qy), signed as a tendency of the inner cell.

    ``A = -(b_in F(out) + b_out F(in)) / (b_in + b_out)
    + b_in b_out / (b_in + b_out) (U_out - U_in)``; when both speeds vanish
    the two physical fluxes are averaged instead.
    """
    f_in = normal_flux(state_in, nx, ny, g)
    f_out = normal_flux(state_out, nx, ny, g)
    b_in = np.asarray(b_in, dtype=float)
    b_out = np.asarray(b_out, dtype=float)
    s = b_in + b_out
    live = s >= MIN_SPEED_SUM
    s_safe = np.where(live, s, 1.0)
    jump = np.stack([state_out[k] - state_in[k] for k in ("w", "qx", "qy")], axis=-1)
    # centred form: swapping the sides negates every term exactly, and equal
    # states give -F exactly
    skew = ((b_in - b_out) / s_safe * 0.5)[..., None]
    cu = (-(0.5 * (f_in + f_out) + skew * (f_out - f_in))
          + (b_in * b_out / s_safe)[..., None] * jump)
    avg = -0.5 * (f_in + f_out)
    return np.where(live[..., None], cu, avg)
