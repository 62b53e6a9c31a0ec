"""Command-line front end.

Subcommands:

    adiosc run CONFIG          one simulation from a YAML config
    adiosc sweep CONFIG        mesh ladder from a config with an n list
    adiosc table ID            built-in convergence study (T1..T13)
    adiosc scenario NAME       named pattern-formation run

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure
(singular system or kinetics breakdown), 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .abd import SingularMatrixError
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .errors import combined_error, error_report, rate
from .mesh import Partition1D, SplineSpace
from .models import KineticsError, build_model
from .output import metadata_yaml, solution_grid_csv, write_text
from .scenarios import SCENARIOS, run_scenario
from .stepper import AdiSolver, TimeGrid, TimeSteppingError
from .tables import TABLES, reproduce_table, rows_to_csv

_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _build_solver(cfg: RunConfig, n: int, workers: int):
    model = build_model(cfg.model, cfg.params, initial=cfg.initial)
    x0, x1, y0, y1 = cfg.domain
    h = (x1 - x0) / n
    timegrid = TimeGrid.from_tau(cfg.t_end, cfg.tau.resolve(h))
    sx = SplineSpace(Partition1D.uniform(x0, x1, n), cfg.degree)
    sy = SplineSpace(Partition1D.uniform(y0, y1, n), cfg.degree)
    return model, AdiSolver(model, sx, sy, timegrid, workers=workers), h


def _cmd_run(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    workers = args.workers or cfg.workers
    resolution = args.resolution or cfg.resolution
    if not isinstance(cfg.n, int):
        print("config has an n list; use the sweep subcommand", file=sys.stderr)
        return _EXIT_CONFIG
    os.makedirs(args.out, exist_ok=True)
    model, solver, _ = _build_solver(cfg, cfg.n, workers)

    files = []

    def on_snapshot(t, spline):
        path = os.path.join(args.out, f"solution_t{t:g}.csv")
        write_text(path, solution_grid_csv(spline, resolution))
        files.append(path)
        print(f"snapshot t={t:g} -> {path}")

    t0 = time.perf_counter()
    result = solver.run(snapshot_times=cfg.snapshot_times,
                        snapshot_form="spline", on_snapshot=on_snapshot)
    solver.close()
    wall = time.perf_counter() - t0

    final_path = os.path.join(args.out, "solution_final.csv")
    write_text(final_path, solution_grid_csv(result.spline, resolution))
    files.append(final_path)

    report_doc = None
    if model.exact is not None:
        rep = error_report(result.spline, model.exact, cfg.t_end,
                           tau=solver.timegrid.tau)
        report_doc = {k: list(getattr(rep, k))
                      for k in ("l2", "h1", "linf", "nodal")}
        print(f"L2 errors:   {rep.l2[0]:.3e}  {rep.l2[1]:.3e}")
        print(f"max errors:  {rep.linf[0]:.3e}  {rep.linf[1]:.3e}")

    meta = metadata_yaml(config=serialize_config(cfg),
                         timings={"wall_seconds": wall,
                                  "n_steps": solver.timegrid.n_steps},
                         errors=report_doc)
    write_text(os.path.join(args.out, "metadata.yaml"), meta)
    print(f"final solution -> {final_path}  ({wall:.2f}s, "
          f"{solver.timegrid.n_steps} steps)")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    workers = args.workers or cfg.workers
    if isinstance(cfg.n, int):
        print("sweep needs an n list in the config", file=sys.stderr)
        return _EXIT_CONFIG
    os.makedirs(args.out, exist_ok=True)

    rows = []
    prev = None
    for n in cfg.n_values:
        model, solver, h = _build_solver(cfg, n, workers)
        t0 = time.perf_counter()
        result = solver.run()
        solver.close()
        wall = time.perf_counter() - t0
        if model.exact is None:
            print("sweep requires a manufactured model with an exact solution",
                  file=sys.stderr)
            return _EXIT_CONFIG
        rep = error_report(result.spline, model.exact, cfg.t_end,
                           tau=solver.timegrid.tau)
        row = {"n": n, "h": h, "seconds": wall,
               "n_steps": solver.timegrid.n_steps}
        for kind in ("l2", "h1", "linf", "nodal"):
            row[kind] = combined_error(rep, kind)
            row[f"{kind}_rate"] = (rate(prev[kind], prev["h"], row[kind], h)
                                   if prev else None)
        rows.append(row)
        prev = row
        print(f"n={n:4d}  L2={row['l2']:.3e}"
              + (f"  rate={row['l2_rate']:.3f}" if row["l2_rate"] else ""))

    cols = ["n", "h", "l2", "l2_rate", "h1", "h1_rate", "linf", "linf_rate",
            "nodal", "nodal_rate", "n_steps", "seconds"]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(
            "" if row.get(c) is None else
            (f"{row[c]:.6e}" if isinstance(row[c], float) else str(row[c]))
            for c in cols))
    path = os.path.join(args.out, "sweep.csv")
    write_text(path, "\n".join(lines) + "\n")
    write_text(os.path.join(args.out, "metadata.yaml"),
               metadata_yaml(config=serialize_config(cfg)))
    print(f"sweep table -> {path}")
    return 0


def _cmd_table(args) -> int:
    if args.list:
        for tid in sorted(TABLES, key=lambda s: int(s[1:])):
            spec = TABLES[tid]
            print(f"{tid:4s} {spec.model:28s} {spec.norm}")
        return 0
    tid = args.id.upper()
    if tid not in TABLES:
        known = ", ".join(sorted(TABLES, key=lambda s: int(s[1:])))
        print(f"unknown table id {args.id!r}; known: {known}", file=sys.stderr)
        return _EXIT_CONFIG
    spec = TABLES[tid]
    degrees = None
    if args.degrees:
        degrees = {int(tok) for tok in args.degrees.split(",")}
    os.makedirs(args.out, exist_ok=True)

    def progress(row):
        msg = f"r={row['r']} n={row['n']:3d}  {row['n_steps']:6d} steps  " \
              f"{row['seconds']:7.2f}s"
        key = "e_rate" if spec.norm == "nodal" else "rate"
        if row.get(key) is not None:
            msg += f"  rate={row[key]:.3f}"
        print(msg)

    rows = reproduce_table(spec, degrees=degrees, workers=args.workers,
                           progress=progress)
    path = os.path.join(args.out, f"{tid}.csv")
    write_text(path, rows_to_csv(spec, rows))
    print(f"{tid} -> {path}")
    return 0


def _cmd_scenario(args) -> int:
    if args.list:
        for name in sorted(SCENARIOS):
            print(f"{name:10s} {SCENARIOS[name].description}")
        return 0
    result = run_scenario(args.name, args.out, smoke=args.smoke,
                          t_end=args.t_end, resolution=args.resolution,
                          workers=args.workers)
    for path in result.files:
        print(path)
    print(f"{result.name}: {result.wall_time:.2f}s")
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adiosc",
        description="ADI Crank-Nicolson spline-collocation reaction-diffusion "
                    "solver")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one simulation from a YAML config")
    run.add_argument("config")
    run.add_argument("--out", default="out")
    run.add_argument("--workers", type=int, default=0,
                     help="override config worker count")
    run.add_argument("--resolution", type=int, default=0,
                     help="override plotting lattice resolution")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="mesh ladder from a config with an n list")
    sweep.add_argument("config")
    sweep.add_argument("--out", default="out")
    sweep.add_argument("--workers", type=int, default=0)
    sweep.set_defaults(func=_cmd_sweep)

    table = sub.add_parser("table", help="built-in convergence study")
    table.add_argument("id", nargs="?", default="")
    table.add_argument("--list", action="store_true")
    table.add_argument("--degrees", default="",
                       help="comma-separated subset of spline degrees")
    table.add_argument("--out", default="out")
    table.add_argument("--workers", type=int, default=1)
    table.set_defaults(func=_cmd_table)

    scen = sub.add_parser("scenario", help="named pattern-formation run")
    scen.add_argument("name", nargs="?", default="")
    scen.add_argument("--list", action="store_true")
    scen.add_argument("--smoke", action="store_true",
                      help="divide the time horizon by 10")
    scen.add_argument("--t-end", type=float, default=None, dest="t_end")
    scen.add_argument("--out", default="out")
    scen.add_argument("--resolution", type=int, default=101)
    scen.add_argument("--workers", type=int, default=1)
    scen.set_defaults(func=_cmd_scenario)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (SingularMatrixError, KineticsError, TimeSteppingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
