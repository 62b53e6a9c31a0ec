"""Deterministic CSV emission of solution surfaces and run metadata."""

from __future__ import annotations

import io
import numpy as np
import yaml

from .stepper import Spline2D

__all__ = ["solution_grid_csv", "write_text", "metadata_yaml"]


def solution_grid_csv(spline: Spline2D, resolution: int) -> str:
    """Sample both components on a uniform lattice including the boundary.

    Rows are emitted row-major in (x, y): x varies slowest.  Floats use
    17 significant digits, so equal runs produce identical bytes.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2 points per axis")
    px = spline.space_x.partition
    py = spline.space_y.partition
    xs = np.linspace(px.a, px.b, resolution)
    ys = np.linspace(py.a, py.b, resolution)
    u1, u2 = spline.eval_grid(xs, ys)
    buf = io.StringIO()
    buf.write("x,y,u1,u2\n")
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            buf.write(f"{x:.17g},{y:.17g},{u1[i, j]:.17g},{u2[i, j]:.17g}\n")
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def metadata_yaml(**sections) -> str:
    """Sidecar document: config echo, versions, timings."""
    import numpy
    from . import __version__

    doc = {"adiosc_version": __version__, "numpy_version": numpy.__version__}
    doc.update(sections)
    return yaml.safe_dump(doc, sort_keys=False)
