"""Time one residual evaluation with the compiled and numpy backends.

    python benchmarks/bench_residual.py [--sizes 20 40 80] [--repeat 5]

Prints the median time per call and per cell for each backend and checks
that both return bitwise identical results.
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from trisw._core import AVAILABLE, get_residual
from trisw.scenarios import build_mesh, build_simulation, dam_break_scenario


def bench(n: int, repeat: int):
    cfg = dam_break_scenario()
    mesh = build_mesh(cfg, 4 * n, n)
    sim = build_simulation(cfg, mesh)
    # advance a little so the state has wet, dry and moving cells
    for _ in range(20):
        sim.step()
    disc, s = sim.disc, sim.state
    kinds, presc = disc.boundary_data(sim.t)
    rows, outputs = [], {}
    for name in AVAILABLE:
        fn = get_residual(name)
        outputs[name] = fn(disc, s.w, s.qx, s.qy, kinds, presc, 9.81)  # warm-up
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn(disc, s.w, s.qx, s.qy, kinds, presc, 9.81)
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        rows.append((name, disc.n_cells, med, med / disc.n_cells))
    same = None
    if len(outputs) == 2:
        same = all(np.array_equal(a, b) for a, b in zip(outputs["compiled"], outputs["numpy"]))
    return rows, same


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    print(f"{'backend':<10}{'cells':>8}{'ms/call':>12}{'us/cell':>10}")
    for n in args.sizes:
        rows, same = bench(n, args.repeat)
        for name, nc, med, per in rows:
            print(f"{name:<10}{nc:>8}{1e3 * med:>12.2f}{1e6 * per:>10.3f}")
        if len(rows) == 2:
            print(f"{'speedup':<10}{rows[0][1]:>8}{rows[1][2] / rows[0][2]:>12.1f}x"
                  f"   identical={same}")
    if "compiled" not in AVAILABLE:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
