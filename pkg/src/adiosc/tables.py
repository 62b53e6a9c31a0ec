"""Built-in convergence studies T1..T8, T10..T13.

Each study runs a manufactured-solution model over a ladder of mesh
sizes at fixed spline degrees, with the time step coupled to the mesh
width so that the temporal error never pollutes the spatial rate being
measured:

    L2 / max-norm studies    tau = h^((r+1)/2)   (solution accuracy r+1)
    H1 studies               tau = h^(r/2)       (gradient accuracy r)
    nodal studies            tau = h^(r-1)       (superconvergence 2r-2)

Observed rates are computed between consecutive mesh sizes from the
combined two-component error.  The id T9 is intentionally unassigned.

Study map:

    T1/T2/T3/T4     manufactured Brusselator on the unit square
                    (L2 / H1 / max / nodal)
    T5/T6/T7        manufactured Gray-Scott on (-1,1)^2, d1=d2=0.001
    T8              same but d1=d2=1, nodal superconvergence
    T10/T11/T12/T13 manufactured Schnakenberg on the unit square
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .errors import combined_error, error_report, rate
from .mesh import Partition1D, SplineSpace
from .models import MODEL_REGISTRY, build_model
from .stepper import AdiSolver, TimeGrid

__all__ = ["TableSpec", "TABLES", "reproduce_table", "rows_to_csv"]

_TAU_EXPONENT = {
    "l2": lambda r: (r + 1) / 2.0,
    "linf": lambda r: (r + 1) / 2.0,
    "h1": lambda r: r / 2.0,
    "nodal": lambda r: float(r - 1),
}


@dataclass(frozen=True)
class TableSpec:
    table_id: str
    model: str
    norm: str                                 # l2 | h1 | linf | nodal
    rows: tuple[tuple[int, tuple[int, ...]], ...]   # (degree, mesh ladder)
    params: Optional[dict] = None             # overrides of model defaults
    t_end: float = 1.0

    def tau_power(self, r: int) -> float:
        return _TAU_EXPONENT[self.norm](r)


_LADDER_A = ((3, (10, 15, 20)), (4, (9, 16, 25)), (5, (10, 15, 20)))
_LADDER_B = ((3, (9, 16, 25)), (4, (10, 15, 20)), (5, (9, 16, 25)))
_LADDER_GS = ((3, (20, 26, 32)), (4, (8, 18, 32)), (5, (20, 26, 32)))
_LADDER_GS_H1 = ((3, (8, 18, 32)), (4, (20, 26, 32)), (5, (8, 18, 32)))
_LADDER_NODAL = ((3, (10, 15, 20)), (4, (10, 15, 20)), (5, (10, 15, 20)))
_LADDER_GS_NODAL = tuple((r, (20, 24, 28, 32, 36)) for r in (3, 4, 5))

TABLES: dict[str, TableSpec] = {
    "T1": TableSpec("T1", "brusselator_manufactured", "l2", _LADDER_A),
    "T2": TableSpec("T2", "brusselator_manufactured", "h1", _LADDER_B),
    "T3": TableSpec("T3", "brusselator_manufactured", "linf", _LADDER_A),
    "T4": TableSpec("T4", "brusselator_manufactured", "nodal", _LADDER_NODAL),
    "T5": TableSpec("T5", "gray_scott_manufactured", "l2", _LADDER_GS),
    "T6": TableSpec("T6", "gray_scott_manufactured", "h1", _LADDER_GS_H1),
    "T7": TableSpec("T7", "gray_scott_manufactured", "linf", _LADDER_GS),
    "T8": TableSpec("T8", "gray_scott_manufactured", "nodal", _LADDER_GS_NODAL,
                    params={"d1": 1.0, "d2": 1.0}),
    "T10": TableSpec("T10", "schnakenberg_manufactured", "l2", _LADDER_A),
    "T11": TableSpec("T11", "schnakenberg_manufactured", "h1", _LADDER_B),
    "T12": TableSpec("T12", "schnakenberg_manufactured", "linf", _LADDER_A),
    "T13": TableSpec("T13", "schnakenberg_manufactured", "nodal", _LADDER_NODAL),
}


def run_study_cell(spec: TableSpec, r: int, n: int, workers: int = 1):
    """One (degree, mesh) cell: solve to t_end and measure every norm."""
    model = build_model(spec.model, spec.params)
    entry_domain = MODEL_REGISTRY[spec.model].domain
    h = (entry_domain.x1 - entry_domain.x0) / n
    tau = h ** spec.tau_power(r)
    timegrid = TimeGrid.from_tau(spec.t_end, tau)
    sx = SplineSpace(Partition1D.uniform(entry_domain.x0, entry_domain.x1, n), r)
    sy = SplineSpace(Partition1D.uniform(entry_domain.y0, entry_domain.y1, n), r)
    solver = AdiSolver(model, sx, sy, timegrid, workers=workers)
    try:
        result = solver.run()
    finally:
        solver.close()
    report = error_report(result.spline, model.exact, spec.t_end,
                          tau=timegrid.tau)
    return report, h, timegrid


def reproduce_table(spec: TableSpec, degrees=None, workers: int = 1,
                    progress=None) -> list[dict]:
    """Run a study and return its rows (dicts) with observed rates.

    degrees restricts the ladder; a failed cell is recorded with an
    'error' entry and aborts only its own row.
    """
    rows: list[dict] = []
    for r, ns in spec.rows:
        if degrees is not None and r not in degrees:
            continue
        prev: Optional[tuple[float, dict]] = None
        for n in ns:
            t0 = time.perf_counter()
            try:
                report, h, timegrid = run_study_cell(spec, r, n, workers)
            except Exception as exc:            # noqa: BLE001 - recorded per row
                rows.append({"r": r, "n": n, "error": str(exc)})
                prev = None
                continue
            elapsed = time.perf_counter() - t0
            if spec.norm == "nodal":
                row = {"r": r, "n": n, "seconds": elapsed,
                       "n_steps": timegrid.n_steps}
                for col, kind in (("e", "nodal"), ("dx", "nodal_dx"),
                                  ("dy", "nodal_dy")):
                    e1, e2 = getattr(report, kind)
                    comb = combined_error(report, kind)
                    row[f"{col}1"], row[f"{col}2"] = e1, e2
                    row[f"{col}_combined"] = comb
                    row[f"{col}_rate"] = (
                        rate(prev[1][f"{col}_combined"], prev[0], comb, h)
                        if prev else None)
            else:
                e1, e2 = getattr(report, spec.norm)
                comb = combined_error(report, spec.norm)
                row = {"r": r, "n": n, "e1": e1, "e2": e2, "combined": comb,
                       "rate": (rate(prev[1]["combined"], prev[0], comb, h)
                                if prev else None),
                       "seconds": elapsed, "n_steps": timegrid.n_steps}
            rows.append(row)
            prev = (h, row)
            if progress is not None:
                progress(row)
    return rows


def rows_to_csv(spec: TableSpec, rows: list[dict]) -> str:
    """Render study rows in a fixed CSV layout."""
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return f"{v:.6e}" if abs(v) < 1e-2 or abs(v) >= 1e4 else f"{v:.4f}"
        return str(v)

    if spec.norm == "nodal":
        cols = ["r", "n", "e1", "e2", "e_rate", "dx1", "dx2", "dx_rate",
                "dy1", "dy2", "dy_rate"]
    else:
        cols = ["r", "n", "e1", "e2", "rate"]
    lines = [",".join(cols)]
    for row in rows:
        if "error" in row:
            lines.append(f"{row['r']},{row['n']},ERROR: {row['error']}")
            continue
        lines.append(",".join(fmt(row.get(c)) for c in cols))
    return "\n".join(lines) + "\n"
