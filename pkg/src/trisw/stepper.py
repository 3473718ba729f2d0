"""Forward-Euler time stepping, CFL control and run-time observers."""
from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass

import numpy as np

from ._core import get_residual
from .boundary import BoundaryCondition, ghost_state  # noqa: F401  (re-exported)
from .constants import DRY_DEPTH, GRAVITY
from .discretization import Discretization
from .mesh import locate_cell
from .reconstruction import CellStateField, desingularized_velocity
from .sources import friction_phi, semi_implicit_discharge_update

DEFAULT_CFL = 0.25


class SolverError(RuntimeError):
    pass


@dataclass
class SimState:
    t: float
    step: int
    cells: CellStateField
    mass: float
    min_depth: float
    max_speed: float


def compute_dt(disc: Discretization, amax, cfl: float = DEFAULT_CFL,
               dt_max: float = math.inf) -> float:
    """``cfl * min_j r_j / a_j`` with ``r_j`` the inradius; ``dt_max`` when nothing moves."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must be in (0, 1], got {cfl}")
    amax = np.asarray(amax)
    moving = amax > 0
    if not moving.any():
        return float(dt_max)
    return float(min(cfl * np.min(disc.inradius[moving] / amax[moving]), dt_max))


def advance(disc: Discretization, state: CellStateField, pi, s2, s3, dt: float,
            n_f: float = 0.0) -> CellStateField:
    """Apply one Euler step given the residual pieces."""
    b = disc.bathymetry.cell
    phi = friction_phi(state.w - b, state.qx, state.qy, n_f, disc.eps)
    w = state.w + dt * pi[:, 0]
    qx = semi_implicit_discharge_update(state.qx, dt, phi, pi[:, 1], s2)
    qy = semi_implicit_discharge_update(state.qy, dt, phi, pi[:, 2], s3)

    bad = ~(np.isfinite(w) & np.isfinite(qx) & np.isfinite(qy))
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise SolverError(
            f"non-finite state in cell {j} at centroid {tuple(disc.centroid[j])}: "
            f"w={w[j]!r} qx={qx[j]!r} qy={qy[j]!r} (previous w={state.w[j]!r}, dt={dt!r})")
    dry = w < b
    if dry.any():
        w[dry] = b[dry]
        qx[dry] = 0.0
        qy[dry] = 0.0
    return CellStateField(w, qx, qy)


def euler_step(disc: Discretization, state: CellStateField, dt: float, t: float = 0.0,
               n_f: float = 0.0, backend: str | None = None,
               g: float = GRAVITY) -> CellStateField:
    """One forward-Euler step of size ``dt`` from time ``t``."""
    kinds, presc = disc.boundary_data(t)
    pi, s2, s3, _ = get_residual(backend)(disc, state.w, state.qx, state.qy, kinds, presc, g)
    return advance(disc, state, pi, s2, s3, dt, n_f)


def diagnostics(disc: Discretization, state: CellStateField):
    h = state.w - disc.bathymetry.cell
    u, v = desingularized_velocity(np.maximum(h, 0.0), state.qx, state.qy, disc.eps)
    return (float(np.sum(h * disc.area)), float(h.min()),
            float(np.sqrt(u * u + v * v).max()))


class Simulation:
    """A single-writer simulation: one discretisation, one evolving state."""

    def __init__(self, disc: Discretization, state: CellStateField, n_f: float = 0.0,
                 cfl: float = DEFAULT_CFL, dt_max: float = math.inf,
                 backend: str | None = None, g: float = GRAVITY, t0: float = 0.0):
        if not 0.0 < cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {cfl}")
        self.disc = disc
        self.state = state.copy()
        self.n_f = float(n_f)
        self.cfl = float(cfl)
        self.dt_max = float(dt_max)
        self.g = float(g)
        self.t = float(t0)
        self.step_count = 0
        self.last_dt = 0.0
        self.residual = get_residual(backend)
        self.initial_mass = diagnostics(disc, self.state)[0]
        self.min_depth_seen = diagnostics(disc, self.state)[1]

    def step(self, dt: float | None = None, t_stop: float | None = None) -> float:
        kinds, presc = self.disc.boundary_data(self.t)
        s = self.state
        pi, s2, s3, amax = self.residual(self.disc, s.w, s.qx, s.qy, kinds, presc, self.g)
        if dt is None:
            dt = compute_dt(self.disc, amax, self.cfl, self.dt_max)
        land = False
        if t_stop is not None and self.t + dt >= t_stop * (1 - 1e-14) - 1e-300:
            dt = t_stop - self.t
            land = True
        if not dt > 0.0:
            raise SolverError(f"non-positive time step {dt!r} at t={self.t!r}")
        self.state = advance(self.disc, s, pi, s2, s3, dt, self.n_f)
        self.t = t_stop if land else self.t + dt
        self.step_count += 1
        self.last_dt = dt
        h_min = float(np.min(self.state.w - self.disc.bathymetry.cell))
        self.min_depth_seen = min(self.min_depth_seen, h_min)
        return dt

    def snapshot(self) -> SimState:
        mass, hmin, umax = diagnostics(self.disc, self.state)
        return SimState(self.t, self.step_count, self.state.copy(), mass, hmin, umax)

    def run(self, t_end: float, observers=(), max_steps: int | None = None,
            max_wall_time: float | None = None) -> SimState:
        """Step until ``t_end`` (hit exactly), landing on observer sample times."""
        start = _time.perf_counter()
        for obs in observers:
            obs(self)
        while self.t < t_end:
            target = t_end
            for obs in observers:
                nt = getattr(obs, "next_time", None)
                if nt is not None:
                    tn = nt(self.t)
                    if tn is not None and self.t < tn < target:
                        target = tn
            self.step(t_stop=target)
            for obs in observers:
                obs(self)
            if max_steps is not None and self.step_count >= max_steps and self.t < t_end:
                raise SolverError(f"step cap {max_steps} reached at t={self.t:.6g}")
            if max_wall_time is not None and _time.perf_counter() - start > max_wall_time:
                raise SolverError(f"wall-time cap {max_wall_time}s reached at t={self.t:.6g}")
        return self.snapshot()


def run(sim: Simulation, t_end: float, observers=(), **caps) -> SimState:
    return sim.run(t_end, observers, **caps)


def _is_sample_time(t, interval):
    k = round(t / interval)
    return abs(t - k * interval) <= 1e-9 * max(interval, abs(t))


class GaugeRecorder:
    """Records ``t, w, h, u, v`` of the cell containing each probe point.

    With ``interval`` the recorder samples (and the run lands) on multiples of
    it; otherwise it samples after every step.
    """

    def __init__(self, disc: Discretization, gauges, interval: float | None = None):
        self.disc = disc
        self.interval = interval
        self.labels = []
        self.cells = []
        for label, x, y in gauges:
            cell = locate_cell(disc.mesh, (x, y))
            if cell is None:
                raise ValueError(f"gauge {label} at ({x}, {y}) lies outside the mesh")
            self.labels.append(label)
            self.cells.append(cell)
        self.cells = np.array(self.cells, dtype=np.intp)
        self.rows: dict[str, list] = {label: [] for label in self.labels}

    def next_time(self, t):
        if not self.interval:
            return None
        return (math.floor(t / self.interval + 1e-9) + 1) * self.interval

    def __call__(self, sim: Simulation):
        if self.interval and not _is_sample_time(sim.t, self.interval):
            return
        s = sim.state
        c = self.cells
        w = s.w[c]
        h = np.maximum(w - self.disc.bathymetry.cell[c], 0.0)
        u, v = desingularized_velocity(h, s.qx[c], s.qy[c], self.disc.eps)
        for i, label in enumerate(self.labels):
            self.rows[label].append((sim.t, w[i], h[i], u[i], v[i]))

    def series(self, label: str) -> np.ndarray:
        return np.array(self.rows[label], dtype=float).reshape(-1, 5)


class AtTimes:
    """Calls ``action(sim)`` once at each listed time (the run lands on them)."""

    def __init__(self, times, action):
        self.times = sorted(float(t) for t in times)
        self.action = action
        self.fired = set()

    def next_time(self, t):
        for tt in self.times:
            if tt > t:
                return tt
        return None

    def __call__(self, sim: Simulation):
        for tt in self.times:
            if tt not in self.fired and abs(sim.t - tt) <= 1e-12 * max(1.0, tt):
                self.fired.add(tt)
                self.action(sim)


class EveryStep:
    """Calls ``action(sim)`` after every step (and once at the start)."""

    def __init__(self, action):
        self.action = action

    def __call__(self, sim: Simulation):
        self.action(sim)


def wet_mask(disc: Discretization, state: CellStateField, tol: float = DRY_DEPTH):
    return state.w - disc.bathymetry.cell > tol
