"""Residual backends.

``compiled`` is the Cython kernel, ``numpy`` the vectorised fallback. The
default is the compiled kernel when the extension was built; set
``TRISW_BACKEND=numpy`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import pyresidual

try:
    from . import cresidual as _cresidual
except ImportError:  # extension not built
    _cresidual = None

AVAILABLE = ("compiled", "numpy") if _cresidual is not None else ("numpy",)


def default_backend() -> str:
    forced = os.environ.get("TRISW_BACKEND", "").strip().lower()
    if forced:
        if forced not in ("compiled", "numpy"):
            raise ValueError(f"TRISW_BACKEND must be 'compiled' or 'numpy', got {forced!r}")
        if forced == "compiled" and _cresidual is None:
            raise ImportError("TRISW_BACKEND=compiled but the extension is not built")
        return forced
    return AVAILABLE[0]


def _packed(disc):
    cached = getattr(disc, "_compiled_args", None)
    if cached is not None:
        return cached

    def f(a):
        return np.ascontiguousarray(a, dtype=np.float64)

    def i(a):
        return np.ascontiguousarray(a, dtype=np.intp)

    b = disc.bathymetry
    args = (f(disc.area), f(disc.centroid), f(disc.cell_vertices), f(disc.edge_length),
            f(disc.normal), f(disc.midpoint), i(disc.neighbor), i(disc.neighbor_edge),
            f(b.edge), f(b.cell), f(b.cell_vertex),
            i(disc.stencil_idx), f(disc.stencil_xy), f(disc.stencil_det),
            np.ascontiguousarray(disc.stencil_ok, dtype=np.uint8),
            np.ascontiguousarray(disc.transmissive, dtype=np.uint8), f(b.gradient),
            i(disc.b_cell), i(disc.b_edge), f(disc.b_normal), f(disc.ghost_b),
            i(disc.e_left), i(disc.e_left_k), i(disc.e_right), i(disc.e_right_k))
    disc._compiled_args = args
    return args


def _compiled_residual(disc, w, qx, qy, kinds, presc, g):
    return _cresidual.residual(
        np.ascontiguousarray(w, dtype=np.float64), np.ascontiguousarray(qx, dtype=np.float64),
        np.ascontiguousarray(qy, dtype=np.float64), np.ascontiguousarray(kinds, dtype=np.intp),
        np.ascontiguousarray(presc, dtype=np.float64), *_packed(disc), disc.eps, g)


def get_residual(name: str | None = None):
    """Residual callable ``(disc, w, qx, qy, kinds, presc, g) -> (pi, s2, s3, amax)``."""
    name = name or default_backend()
    if name == "numpy":
        return pyresidual.residual
    if name == "compiled":
        if _cresidual is None:
            raise ImportError("compiled backend requested but the extension is not built")
        return _compiled_residual
    raise ValueError(f"unknown backend {name!r}")
