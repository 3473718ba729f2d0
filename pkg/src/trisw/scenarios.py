"""Benchmark experiments: bathymetry, initial state, boundary forcing, gauges.

Each builder returns a :class:`ScenarioConfig`; :func:`build_simulation`
turns one into a ready-to-run :class:`~trisw.stepper.Simulation`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bathymetry import sample_bathymetry
from .boundary import BoundaryCondition
from .constants import GRAVITY
from .discretization import Discretization
from .mesh import Mesh, generate_rect_mesh
from .reconstruction import CellStateField
from .stepper import DEFAULT_CFL, Simulation

SLOPE_B0 = 0.015


@dataclass
class ExactSolution:
    h: Callable
    qx: Callable
    qy: Callable


@dataclass
class ScenarioConfig:
    name: str
    x_range: tuple
    y_range: tuple
    nx: int
    ny: int
    bathymetry: Callable
    initial: Callable  # (x, y, B) at centroids -> (w, qx, qy)
    bcs: dict
    n_f: float
    t_end: float
    gauges: list = field(default_factory=list)
    snapshot_times: list = field(default_factory=list)
    g: float = GRAVITY
    exact: ExactSolution | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        for label, x, y in self.gauges:
            if not (x0 <= x <= x1 and y0 <= y <= y1):
                raise ValueError(f"gauge {label} ({x}, {y}) outside the domain")


def _sech2(z):
    return 1.0 / np.cosh(z) ** 2


# ----------------------------------------------------------------- forcing
class ZeroForcing:
    def __call__(self, t):
        return 0.0, 0.0, 0.0


class SolitaryForcing:
    """Boundary solitary wave: ``H sech²(√(3H/4h₀³) c t)``, ``u = c η/(η + h₀)``."""

    def __init__(self, H, h0, g=GRAVITY, sign=1.0):
        self.H, self.h0, self.sign = H, h0, sign
        self.c = math.sqrt(g * (h0 + H))
        self.k = math.sqrt(3.0 * H / (4.0 * h0 ** 3))

    def __call__(self, t):
        eta = self.H * float(_sech2(self.k * self.c * t))
        return eta, self.sign * self.c * eta / (eta + self.h0), 0.0


class ShelfSolitaryForcing:
    """``α h_s sech²(√(3g α(α+1)/(4 h_s)) t)`` with ``u = c η/(η + h_s)``."""

    def __init__(self, alpha, hs, g=GRAVITY):
        self.alpha, self.hs = alpha, hs
        self.c = math.sqrt(g * hs * (1.0 + alpha))
        self.k = math.sqrt(3.0 * g / (4.0 * hs) * alpha * (alpha + 1.0))

    def __call__(self, t):
        eta = self.alpha * self.hs * float(_sech2(self.k * t))
        return eta, self.c * eta / (eta + self.hs), 0.0


class SinusoidalForcing:
    """``η = (H/2) sin(2πt/T)`` with the linear long-wave velocity ``η √(g/h₀)``."""

    def __init__(self, H, T, h0, g=GRAVITY):
        self.H, self.T, self.h0, self.g = H, T, h0, g

    def __call__(self, t):
        eta = 0.5 * self.H * math.sin(2.0 * math.pi * t / self.T)
        return eta, eta * math.sqrt(self.g / self.h0), 0.0


# --------------------------------------------------------------- steady slope
STEADY_REGIMES = {"supercritical": (0.02, 0.01), "subcritical": (0.1, 0.05)}


def normal_depth(q0: float, n_f: float, slope: float = SLOPE_B0) -> float:
    """Depth where gravity along the slope balances Manning friction."""
    return (n_f ** 2 * q0 ** 2 / slope) ** 0.3


def froude(q0: float, h0: float, g: float = GRAVITY) -> float:
    return q0 / (h0 * math.sqrt(g * h0))


def steady_slope_scenario(regime: str = "supercritical", orientation: str = "x",
                          nx: int | None = None, ny: int | None = None) -> ScenarioConfig:
    """Uniform flow down a planar incline. ``orientation='y'`` rotates it 90°."""
    if regime not in STEADY_REGIMES:
        raise ValueError(f"regime must be one of {sorted(STEADY_REGIMES)}")
    if orientation not in ("x", "y"):
        raise ValueError("orientation must be 'x' or 'y'")
    q0, n_f = STEADY_REGIMES[regime]
    h0 = normal_depth(q0, n_f)
    along_x = orientation == "x"

    if along_x:
        bed = lambda x, y: -SLOPE_B0 * (np.asarray(x, float) - 2.53) + 0.0 * np.asarray(y, float)
        qvec = (q0, 0.0)
        xr, yr, dn = (0.0, 2.5), (0.0, 0.2), (nx or 100, ny or 10)
        bcs = {"left": BoundaryCondition("outflow"), "right": BoundaryCondition("outflow"),
               "bottom": BoundaryCondition("wall"), "top": BoundaryCondition("wall")}
        gauges = [("C", 1.25, 0.1)]
    else:
        bed = lambda x, y: -SLOPE_B0 * (np.asarray(y, float) - 2.53) + 0.0 * np.asarray(x, float)
        qvec = (0.0, q0)
        xr, yr, dn = (0.0, 0.2), (0.0, 2.5), (nx or 10, ny or 100)
        bcs = {"bottom": BoundaryCondition("outflow"), "top": BoundaryCondition("outflow"),
               "left": BoundaryCondition("wall"), "right": BoundaryCondition("wall")}
        gauges = [("C", 0.1, 1.25)]

    def initial(x, y, b):
        return b + h0, np.full_like(b, qvec[0]), np.full_like(b, qvec[1])

    exact = ExactSolution(h=lambda x, y: np.full(np.shape(x), h0),
                          qx=lambda x, y: np.full(np.shape(x), qvec[0]),
                          qy=lambda x, y: np.full(np.shape(x), qvec[1]))
    return ScenarioConfig(f"steady_slope", xr, yr, dn[0], dn[1], bed, initial, bcs, n_f, 150.0,
                          gauges=gauges, exact=exact,
                          params={"regime": regime, "orientation": orientation, "q0": q0,
                                  "h0": h0, "froude": froude(q0, h0)})


# ------------------------------------------------------------------ dam break
def dam_break_bed(x, y):
    x = np.asarray(x, dtype=float)
    return np.where(x < 3.4, 0.0, (x - 3.4) / 10.0) + 0.0 * np.asarray(y, float)


def dam_break_scenario(closed: bool = False, nx: int | None = None,
                       ny: int | None = None) -> ScenarioConfig:
    """Reservoir of depth 0.25 behind x = 2.25 releasing onto a 1:10 ramp.

    ``closed=True`` replaces the outlet by a wall (volume-conservation check).
    """
    def initial(x, y, b):
        w = np.where(x < 2.25, 0.25, b)
        w = np.maximum(w, b)
        return w, np.zeros_like(b), np.zeros_like(b)

    outlet = BoundaryCondition("wall" if closed else "outflow")
    bcs = {"right": outlet, "*": BoundaryCondition("wall")}
    gauges = [("G1", 1.4, 0.5), ("G2", 2.25, 0.5), ("G3", 3.4, 0.5), ("G4", 4.5, 0.5)]
    return ScenarioConfig("dam_break", (0.0, 7.0), (0.0, 1.0), nx or 84, ny or 18,
                          dam_break_bed, initial, bcs, 0.01, 10.0, gauges=gauges,
                          params={"closed": closed})


# ----------------------------------------------------------- solitary run-up
SOLITARY_KINDS = {"breaking": (0.3, 14.0, 20.0, [1.6, 4.79, 11.18, 17.59]),
                  "nonbreaking": (0.0185, 38.5, 25.0, [8.0, 11.17, 14.37, 17.56, 20.75])}
BEACH_SLOPE = 19.85


def solitary_runup_scenario(kind: str = "breaking", toe: float = BEACH_SLOPE,
                            nx: int | None = None, ny: int | None = None) -> ScenarioConfig:
    """Solitary wave climbing a 1:19.85 beach; the shoreline is at ``toe − 19.85 h₀``.

    The default toe puts the still shoreline at x = 0; the wave starts at
    positive ``x0`` and travels toward −x.
    """
    if kind not in SOLITARY_KINDS:
        raise ValueError(f"kind must be one of {sorted(SOLITARY_KINDS)}")
    H, x0, t_end, snaps = SOLITARY_KINDS[kind]
    h0 = 1.0
    shore = toe - BEACH_SLOPE * h0
    c = math.sqrt(GRAVITY * (h0 + H))
    k = math.sqrt(3.0 * H / (4.0 * h0 ** 3))

    def bed(x, y):
        x = np.asarray(x, dtype=float)
        return np.maximum(-(x - shore) / BEACH_SLOPE, -h0) + 0.0 * np.asarray(y, float)

    def initial(x, y, b):
        eta = H * _sech2(k * (x - x0))
        w = np.maximum(eta, b)
        h = w - b
        u = -c * eta / (eta + h0)
        return w, h * u, np.zeros_like(b)

    bcs = {"right": BoundaryCondition("inflow_analytic", forcing=ZeroForcing(), datum=0.0),
           "left": BoundaryCondition("outflow"), "*": BoundaryCondition("wall")}
    gauges = [("x0", x0, 0.5), ("shore", shore + 0.05, 0.5)]
    return ScenarioConfig("solitary_runup", (-20.0, 60.0), (0.0, 1.0), nx or 800, ny or 5,
                          bed, initial, bcs, 0.01, t_end, gauges=gauges, snapshot_times=snaps,
                          params={"kind": kind, "H": H, "h0": h0, "x0": x0, "toe": toe,
                                  "shoreline": shore, "c": c})


# ------------------------------------------------------------- periodic waves
def periodic_wave_scenario(series: tuple | None = None, toe: float = 0.0,
                           nx: int | None = None, ny: int | None = None) -> ScenarioConfig:
    """Periodic waves (H = 0.115, T = 2.2) on a 1:35 slope starting at ``toe``.

    ``series=(t, w, u, v)`` replaces the synthetic sinusoid by measured data.
    """
    H, T, h0 = 0.115, 2.2, 0.4

    def bed(x, y):
        x = np.asarray(x, dtype=float)
        return -h0 + np.maximum(x - toe, 0.0) / 35.0 + 0.0 * np.asarray(y, float)

    def initial(x, y, b):
        return np.maximum(0.0, b), np.zeros_like(b), np.zeros_like(b)

    if series is None:
        inflow = BoundaryCondition("inflow_analytic", forcing=SinusoidalForcing(H, T, h0),
                                   datum=0.0)
    else:
        inflow = BoundaryCondition("inflow_series", series=series)
    bcs = {"left": inflow, "right": BoundaryCondition("outflow"), "*": BoundaryCondition("wall")}
    gauges = [("L1", 0.0, 0.3), ("L2", 1.2, 0.3), ("L3", 2.4, 0.3), ("L4", 3.6, 0.3)]
    return ScenarioConfig("periodic_wave", (0.0, 8.0), (0.0, 0.6), nx or 160, ny or 12,
                          bed, initial, bcs, 0.01, 30.0, gauges=gauges,
                          params={"H": H, "T": T, "h0": h0, "toe": toe,
                                  "forcing": "series" if series is not None else "synthetic"})


# ------------------------------------------------------------ conical island
ISLAND_CENTER = (12.98, 13.80)


def conical_island_bed(x, y):
    r = np.hypot(np.asarray(x, float) - ISLAND_CENTER[0], np.asarray(y, float) - ISLAND_CENTER[1])
    return np.clip((3.6 - r) / 4.0, 0.0, 0.625)


def conical_island_scenario(ratio: float = 0.2, nx: int | None = None,
                            ny: int | None = None) -> ScenarioConfig:
    """Solitary wave of height ``ratio·h₀`` sent from the left onto a conical island."""
    if ratio not in (0.1, 0.2):
        raise ValueError("ratio must be 0.1 or 0.2")
    h0 = 0.32
    H = ratio * h0

    def initial(x, y, b):
        return np.maximum(h0, b), np.zeros_like(b), np.zeros_like(b)

    bcs = {"left": BoundaryCondition("inflow_analytic", forcing=SolitaryForcing(H, h0),
                                     datum=h0),
           "right": BoundaryCondition("outflow"), "*": BoundaryCondition("wall")}
    gauges = [("S1", 9.36, 13.80), ("S2", 10.36, 13.80), ("S3", 12.96, 11.22),
              ("S4", 15.56, 13.80)]
    return ScenarioConfig("conical_island", (0.0, 25.0), (0.0, 30.0), nx or 100, ny or 120,
                          conical_island_bed, initial, bcs, 0.016, 20.0, gauges=gauges,
                          snapshot_times=[4.0, 6.0, 8.0, 10.0],
                          params={"ratio": ratio, "H": H, "h0": h0})


# ------------------------------------------------------------- complex beach
HS, LS = 1.02, 8.0


def curved_beach_bed(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ramp = -HS + 0.4 * (x - LS) / (3.0 + np.cos(np.pi * y / LS))
    return np.where(x < LS, -HS, ramp)


def complex_beach_scenario(alpha: float = 0.2, still_level: float = 0.0, closed: bool = False,
                           nx: int | None = None, ny: int | None = None) -> ScenarioConfig:
    """Solitary wave entering at x = 0 over a curved sloping beach.

    ``closed=True`` walls every side and drops the forcing (lake at rest).
    """
    def initial(x, y, b):
        return np.maximum(still_level, b), np.zeros_like(b), np.zeros_like(b)

    if closed:
        bcs = {"*": BoundaryCondition("wall")}
    else:
        bcs = {"left": BoundaryCondition("inflow_analytic", forcing=ShelfSolitaryForcing(alpha, HS),
                                         datum=still_level),
               "right": BoundaryCondition("outflow"), "*": BoundaryCondition("wall")}
    return ScenarioConfig("complex_beach", (0.0, 30.0), (-LS, LS), nx or 120, ny or 64,
                          curved_beach_bed, initial, bcs, 0.01, 25.0,
                          gauges=[("centre", 20.0, 0.0)],
                          snapshot_times=[2.0, 4.0, 6.0, 8.0, 10.0, 11.0, 14.0],
                          params={"alpha": alpha, "still_level": still_level, "closed": closed})


SCENARIOS = {
    "steady_slope": (steady_slope_scenario, "uniform flow down a 0.015 incline (exact steady state)"),
    "dam_break": (dam_break_scenario, "dam break onto a dry 1:10 ramp, gauges G1-G4"),
    "solitary_runup": (solitary_runup_scenario, "solitary wave run-up on a 1:19.85 beach"),
    "periodic_wave": (periodic_wave_scenario, "periodic waves on a 1:35 beach, gauges L1-L4"),
    "conical_island": (conical_island_scenario, "solitary wave around a conical island, gauges S1-S4"),
    "complex_beach": (complex_beach_scenario, "solitary wave over a curved sloping beach"),
}


def get_scenario(name: str, **params) -> ScenarioConfig:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}")
    return SCENARIOS[name][0](**params)


# ------------------------------------------------------------------ assembly
def build_mesh(cfg: ScenarioConfig, nx: int | None = None, ny: int | None = None,
               diagonal_pattern: str = "alternating") -> Mesh:
    return generate_rect_mesh(cfg.x_range, cfg.y_range, nx or cfg.nx, ny or cfg.ny,
                              diagonal_pattern)


def initial_state(cfg: ScenarioConfig, disc: Discretization) -> CellStateField:
    x, y = disc.centroid[:, 0], disc.centroid[:, 1]
    b = disc.bathymetry.cell
    w, qx, qy = cfg.initial(x, y, b)
    w = np.maximum(np.asarray(w, dtype=float), b)
    return CellStateField(w, np.asarray(qx, dtype=float).copy(), np.asarray(qy, dtype=float).copy())


def build_simulation(cfg: ScenarioConfig, mesh: Mesh | None = None, cfl: float = DEFAULT_CFL,
                     backend: str | None = None, dt_max: float = math.inf,
                     n_f: float | None = None) -> Simulation:
    if mesh is None:
        mesh = build_mesh(cfg)
    bathy = sample_bathymetry(mesh, cfg.bathymetry)
    disc = Discretization(mesh, bathy, cfg.bcs)
    state = initial_state(cfg, disc)
    return Simulation(disc, state, n_f=cfg.n_f if n_f is None else n_f, cfl=cfl,
                      dt_max=dt_max, backend=backend, g=cfg.g)


def error_norms(field, exact, area):
    """``(L1, L2, Linf)`` of the cell-wise error, weighted by cell area."""
    e = np.abs(np.asarray(field, dtype=float) - np.asarray(exact, dtype=float))
    area = np.asarray(area, dtype=float)
    return float(np.sum(e * area)), float(np.sqrt(np.sum(e * e * area))), float(np.max(e, initial=0.0))


def steady_errors(sim: Simulation, exact: ExactSolution) -> dict:
    """Norm table rows ``{'h': (L1, L2, Linf), 'qx': ..., 'qy': ...}``."""
    disc = sim.disc
    x, y = disc.centroid[:, 0], disc.centroid[:, 1]
    s = sim.state
    h = s.w - disc.bathymetry.cell
    return {"h": error_norms(h, exact.h(x, y), disc.area),
            "qx": error_norms(s.qx, exact.qx(x, y), disc.area),
            "qy": error_norms(s.qy, exact.qy(x, y), disc.area)}
