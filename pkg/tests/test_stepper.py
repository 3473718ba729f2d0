import math

import numpy as np
import pytest

from trisw.boundary import BoundaryCondition
from trisw.reconstruction import CellStateField
from trisw.stepper import (AtTimes, EveryStep, GaugeRecorder, Simulation, SolverError,
                           compute_dt, diagnostics, euler_step)
from trisw.scenarios import complex_beach_scenario, build_simulation

from conftest import make_disc

G = 9.81


def still(disc, level):
    nc = disc.n_cells
    return CellStateField(np.maximum(np.full(nc, level), disc.bathymetry.cell), np.zeros(nc),
                          np.zeros(nc))


def test_compute_dt_unit_square():
    disc = make_disc(nx=1, ny=1, x=(0, 1), y=(0, 1), pattern="uniform")
    r = 1.0 / (2.0 + math.sqrt(2.0))  # inradius of the right isosceles half square
    np.testing.assert_allclose(disc.inradius, r, rtol=1e-14)
    dt = compute_dt(disc, np.full(2, math.sqrt(G)), cfl=0.5)
    assert dt == pytest.approx(0.5 * r / math.sqrt(G), rel=1e-14)


def test_compute_dt_all_dry_returns_cap():
    disc = make_disc(nx=2, ny=2)
    assert compute_dt(disc, np.zeros(disc.n_cells), dt_max=0.7) == 0.7


@pytest.mark.parametrize("cfl", [0.0, -0.1, 1.5])
def test_compute_dt_rejects_cfl(cfl):
    disc = make_disc(nx=1, ny=1)
    with pytest.raises(ValueError):
        compute_dt(disc, np.ones(disc.n_cells), cfl)


def test_lake_at_rest_curved_beach_100_steps():
    scen = complex_beach_scenario(closed=True, still_level=3.5, nx=30, ny=16)
    sim = build_simulation(scen)
    w0 = sim.state.w.copy()
    for _ in range(100):
        sim.step()
    assert np.abs(sim.state.w - w0).max() <= 1e-13
    assert np.abs(sim.state.qx).max() <= 1e-13
    assert np.abs(sim.state.qy).max() <= 1e-13


def test_mass_conserved_with_walls():
    disc = make_disc(nx=8, ny=6)
    c = disc.centroid
    w = 1.0 + 0.1 * np.exp(-20 * ((c[:, 0] - 0.8) ** 2 + (c[:, 1] - 0.4) ** 2))
    sim = Simulation(disc, CellStateField(w, 0.2 * np.ones_like(w), np.zeros_like(w)))
    m0 = sim.initial_mass
    for _ in range(50):
        sim.step()
        assert abs(diagnostics(disc, sim.state)[0] - m0) <= 1e-14 * m0


def test_t_end_zero_fires_observers_once():
    disc = make_disc(nx=2, ny=2)
    calls = []
    sim = Simulation(disc, still(disc, 1.0))
    final = sim.run(0.0, [EveryStep(lambda s: calls.append(s.t))])
    assert calls == [0.0]
    assert final.step == 0
    np.testing.assert_array_equal(final.cells.w, 1.0)


def test_run_lands_on_sample_times_and_t_end():
    disc = make_disc(nx=4, ny=3)
    c = disc.centroid
    w = 1.0 + 0.05 * np.cos(np.pi * c[:, 0])
    sim = Simulation(disc, CellStateField(w, 0 * w, 0 * w))
    hits = []
    rec = GaugeRecorder(disc, [("a", 0.5, 0.5)], interval=0.05)
    final = sim.run(0.2, [rec, AtTimes([0.123], lambda s: hits.append(s.t))])
    assert final.t == 0.2
    assert hits == [0.123]
    ts = rec.series("a")[:, 0]
    np.testing.assert_allclose(ts, [0.0, 0.05, 0.1, 0.15, 0.2], rtol=0, atol=1e-12)


def test_deterministic_replay():
    def go():
        disc = make_disc(lambda x, y: 0.2 * x, nx=6, ny=4)
        c = disc.centroid
        w = np.maximum(0.3 + 0.1 * (c[:, 0] < 0.7), disc.bathymetry.cell)
        sim = Simulation(disc, CellStateField(w, 0 * w, 0 * w), n_f=0.01)
        rec = GaugeRecorder(disc, [("g", 1.0, 0.5)])
        sim.run(0.3, [rec])
        return rec.series("g")
    np.testing.assert_array_equal(go(), go())


def test_nan_aborts_with_cell_id():
    disc = make_disc(nx=2, ny=2)
    s = still(disc, 1.0)
    s.qx[3] = np.nan
    with pytest.raises(SolverError, match="cell"):
        euler_step(disc, s, 1e-3)


def test_step_and_wall_caps():
    disc = make_disc(nx=3, ny=2)
    sim = Simulation(disc, still(disc, 1.0))
    with pytest.raises(SolverError, match="step cap"):
        sim.run(10.0, max_steps=3)


def test_dry_bed_stays_dry_and_nonnegative():
    disc = make_disc(lambda x, y: 0.5 * x, nx=10, ny=3)
    sim = Simulation(disc, still(disc, 0.3))
    sim.run(0.5)
    assert sim.min_depth_seen >= 0.0
    assert np.all(sim.state.w >= disc.bathymetry.cell)


def test_friction_decelerates():
    disc = make_disc(nx=4, ny=2, bcs={"*": BoundaryCondition("wall")})
    nc = disc.n_cells
    s = CellStateField(np.full(nc, 0.1), np.full(nc, 0.05), np.zeros(nc))
    free = euler_step(disc, s, 1e-3)
    rough = euler_step(disc, s, 1e-3, n_f=0.05)
    assert np.all(np.abs(rough.qx) <= np.abs(free.qx) + 1e-15)
