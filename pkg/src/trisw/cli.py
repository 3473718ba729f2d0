"""Command-line front end: ``trisw run | mesh-gen | mesh-check | list-scenarios``."""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .bathymetry import sample_bathymetry
from .config import ConfigError, RunConfig, parse_config
from .io import read_series_csv, write_gauge_csv, write_snapshot
from .mesh import MeshError, generate_rect_mesh, load_mesh, save_mesh
from .scenarios import (SCENARIOS, build_mesh, build_simulation, get_scenario,
                        steady_errors)
from .stepper import AtTimes, GaugeRecorder, SolverError

OUTPUT_ROOT_ENV = "TRISW_OUTPUT_ROOT"
MASS_TOL = 1e-12


@dataclass
class RunReport:
    scenario: str
    wall_time: float
    steps: int
    t_final: float
    mass_initial: float
    mass_final: float
    min_depth: float
    max_speed: float
    output_dir: str
    gauge_paths: dict = field(default_factory=dict)
    snapshot_paths: list = field(default_factory=list)
    norms: dict | None = None
    failures: list = field(default_factory=list)

    @property
    def mass_drift(self) -> float:
        return abs(self.mass_final - self.mass_initial) / max(abs(self.mass_initial), 1e-300)

    @property
    def ok(self) -> bool:
        return not self.failures

    def norm_table(self) -> str:
        if self.norms is None:
            return ""
        lines = [f"{'variable':<10}{'L1-error':>14}{'L2-error':>14}{'Linf-error':>14}"]
        for var in ("h", "qx", "qy"):
            l1, l2, li = self.norms[var]
            lines.append(f"{var:<10}{l1:>14.3e}{l2:>14.3e}{li:>14.3e}")
        return "\n".join(lines)

    def to_text(self, include_timing: bool = False) -> str:
        out = [f"scenario: {self.scenario}", f"t_final: {self.t_final!r}", f"steps: {self.steps}",
               f"mass_initial: {self.mass_initial!r}", f"mass_final: {self.mass_final!r}",
               f"mass_drift_relative: {self.mass_drift!r}", f"min_depth: {self.min_depth!r}",
               f"max_speed: {self.max_speed!r}"]
        if include_timing:
            out.append(f"wall_time_s: {self.wall_time:.3f}")
        for label, path in self.gauge_paths.items():
            out.append(f"gauge {label}: {path}")
        for path in self.snapshot_paths:
            out.append(f"snapshot: {path}")
        if self.norms is not None:
            out += ["", self.norm_table()]
        out.append("status: " + ("ok" if self.ok else "FAILED: " + "; ".join(self.failures)))
        return "\n".join(out) + "\n"


def resolve_output_dir(cfg: RunConfig) -> str:
    root = os.environ.get(OUTPUT_ROOT_ENV, "trisw_output")
    if cfg.output_dir is None:
        return os.path.join(root, cfg.scenario)
    if os.path.isabs(cfg.output_dir):
        return cfg.output_dir
    return os.path.join(root, cfg.output_dir)


def _fmt_time(t: float) -> str:
    return repr(float(t)).replace(".", "p")


def execute(cfg: RunConfig, verbose: bool = False) -> RunReport:
    """Run one configuration and write its outputs."""
    params = dict(cfg.params)
    if "series" in params:
        params["series"] = read_series_csv(params["series"])
    scen = get_scenario(cfg.scenario, **params)
    if cfg.mesh is not None:
        mesh = load_mesh(cfg.mesh)
    else:
        mesh = build_mesh(scen, cfg.nx, cfg.ny, cfg.diagonal)
    sim = build_simulation(scen, mesh, cfl=cfg.cfl, backend=cfg.backend,
                           dt_max=cfg.dt_max if cfg.dt_max is not None else math.inf,
                           n_f=cfg.n_f)
    t_end = scen.t_end if cfg.t_end is None else cfg.t_end
    gauges = scen.gauges if cfg.gauges is None else cfg.gauges
    snaps = scen.snapshot_times if cfg.snapshot_times is None else cfg.snapshot_times
    snaps = [t for t in snaps if t <= t_end]

    out_dir = resolve_output_dir(cfg)
    os.makedirs(out_dir, exist_ok=True)
    ext = "csv" if cfg.snapshot_format == "csv" else "vtk"
    snapshot_paths: list[str] = []

    def take_snapshot(s):
        path = os.path.join(out_dir, f"snapshot_t{_fmt_time(s.t)}.{ext}")
        write_snapshot(s.state, s.disc.mesh, s.disc.bathymetry, path, cfg.snapshot_format)
        snapshot_paths.append(path)

    observers = []
    recorder = GaugeRecorder(sim.disc, gauges, cfg.gauge_interval) if gauges else None
    if recorder is not None:
        observers.append(recorder)
    if snaps:
        observers.append(AtTimes(snaps, take_snapshot))

    mass0 = sim.initial_mass
    start = time.perf_counter()
    final = sim.run(t_end, observers, max_steps=cfg.max_steps, max_wall_time=cfg.max_wall_time)
    wall = time.perf_counter() - start

    gauge_paths = {}
    if recorder is not None:
        for label in recorder.labels:
            path = os.path.join(out_dir, f"gauge_{label}.csv")
            write_gauge_csv(path, recorder.rows[label])
            gauge_paths[label] = path

    norms = steady_errors(sim, scen.exact) if scen.exact is not None else None
    report = RunReport(cfg.scenario, wall, final.step, final.t, mass0, final.mass,
                       sim.min_depth_seen, final.max_speed, out_dir, gauge_paths,
                       snapshot_paths, norms)
    if sim.min_depth_seen < 0:
        report.failures.append(f"negative mean depth {sim.min_depth_seen!r}")
    if sim.disc.wall_only() and report.mass_drift > MASS_TOL:
        report.failures.append(f"mass drift {report.mass_drift:.3e} exceeds {MASS_TOL:g}")
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write(report.to_text())
    return report


# ---------------------------------------------------------------- commands
def _cmd_run(args) -> int:
    source = args.config
    tokens = list(args.overrides)
    if source is not None and "=" in source and not os.path.exists(source):
        tokens.insert(0, source)
        source = None
    cfg = parse_config(source, tokens)
    report = execute(cfg)
    sys.stdout.write(report.to_text(include_timing=True))
    return 0 if report.ok else 1


def _cmd_mesh_gen(args) -> int:
    mesh = generate_rect_mesh((args.x0, args.x1), (args.y0, args.y1), args.nx, args.ny,
                              args.pattern)
    z = None
    if args.scenario:
        z = sample_bathymetry(mesh, get_scenario(args.scenario).bathymetry).vertex
    save_mesh(mesh, args.output, z)
    print(f"wrote {args.output}: {mesh.n_vertices} vertices, {mesh.n_cells} cells")
    return 0


def _cmd_mesh_check(args) -> int:
    mesh = load_mesh(args.path)
    m = mesh
    closure = np.abs(np.einsum("ck,ckd->cd", m.edge_length, m.normal)).max() if m.n_cells else 0.0
    tags: dict[str, int] = {}
    for _, _, tag in m.boundary_edges():
        tags[tag] = tags.get(tag, 0) + 1
    print(f"vertices: {m.n_vertices}")
    print(f"cells: {m.n_cells}")
    print(f"total area: {float(m.area.sum())!r}")
    print(f"min cell area: {float(m.area.min())!r}")
    print(f"max edge-closure residual: {float(closure):.3e}")
    print("boundary edges: " + ", ".join(f"{t}={n}" for t, n in sorted(tags.items())))
    return 0


def _cmd_list(args) -> int:
    for name, (_, desc) in SCENARIOS.items():
        print(f"{name:<16} {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trisw", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configuration",
                       description=f"Run a key=value config. Outputs go under ${OUTPUT_ROOT_ENV} "
                                   "(default ./trisw_output).")
    r.add_argument("config", nargs="?", help="config file (key=value lines)")
    r.set_defaults(func=_cmd_run)

    g = sub.add_parser("mesh-gen", help="write a structured triangular mesh")
    g.add_argument("--x0", type=float, default=0.0)
    g.add_argument("--x1", type=float, default=1.0)
    g.add_argument("--y0", type=float, default=0.0)
    g.add_argument("--y1", type=float, default=1.0)
    g.add_argument("--nx", type=int, default=10)
    g.add_argument("--ny", type=int, default=10)
    g.add_argument("--pattern", choices=("uniform", "alternating"), default="alternating")
    g.add_argument("--scenario", choices=tuple(SCENARIOS), help="fill the B column from it")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_mesh_gen)

    c = sub.add_parser("mesh-check", help="load and validate a mesh file")
    c.add_argument("path")
    c.set_defaults(func=_cmd_mesh_check)

    s = sub.add_parser("list-scenarios", help="list built-in scenarios")
    s.set_defaults(func=_cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if args.command == "run":
        args.overrides = extra
    elif extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args)
    except (ConfigError, MeshError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
