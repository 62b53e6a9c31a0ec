"""Error norms, nodal superconvergence measurements and observed rates.

L2 and H1 norms integrate (u_h - u)^2 and its gradient with a per-cell
tensor Gauss rule of r+2 points per axis, enough that quadrature error
stays below the discretization error being measured.  The max norm
samples a 10 x 10 equispaced lattice in every cell, endpoints included
on both axes.  Nodal errors take the solution and its first partials at
the breakpoint tensor grid, evaluating from the left cell at interior
breakpoints (the basis is C1, so the side only matters at roundoff).

Combined two-component errors: root-sum-square for the integral norms,
maximum for the max norm and all nodal columns.  The observed rate
between two meshes is log(e1/e2) / log(h1/h2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .mesh import gauss_rule
from .stepper import Spline2D

__all__ = ["ErrorReport", "RateTable", "error_report", "combined_error", "rate"]

_RSS_KINDS = frozenset({"l2", "h1"})
_MAX_KINDS = frozenset({"linf", "nodal", "nodal_dx", "nodal_dy"})


@dataclass(frozen=True)
class ErrorReport:
    """Per-component error norms for one run (component order (u1, u2))."""

    l2: tuple[float, float]
    h1: tuple[float, float]
    linf: tuple[float, float]
    nodal: tuple[float, float]
    nodal_dx: tuple[float, float]
    nodal_dy: tuple[float, float]
    degree: int
    cells: tuple[int, int]
    tau: Optional[float] = None


def _cell_weights(space, rule) -> np.ndarray:
    return np.repeat(space.partition.widths, rule.weights.size) \
        * np.tile(rule.weights, space.n_cells)


def error_report(spline: Spline2D, exact, t: float,
                 tau: Optional[float] = None) -> ErrorReport:
    """Measure all norms of u_h - u at time t.

    exact must provide value/grad_x/grad_y(x, y, t) -> (u1, u2) on
    broadcastable arrays.
    """
    sx, sy = spline.space_x, spline.space_y
    r = sx.r
    rule = gauss_rule(r + 2)

    xq, (qx0, qx1) = sx.eval_matrix_cellwise(rule.nodes)
    yq, (qy0, qy1) = sy.eval_matrix_cellwise(rule.nodes)
    wx = _cell_weights(sx, rule)
    wy = _cell_weights(sy, rule)
    xc, yc = xq[:, None], yq[None, :]

    ten = np.linspace(0.0, 1.0, 10)
    xs, (sx0, _) = sx.eval_matrix_cellwise(ten)
    ys, (sy0, _) = sy.eval_matrix_cellwise(ten)

    xb = sx.partition.breaks
    yb = sy.partition.breaks
    nx0, nx1 = sx.eval_matrix(xb, 0), sx.eval_matrix(xb, 1)
    ny0, ny1 = sy.eval_matrix(yb, 0), sy.eval_matrix(yb, 1)

    uq = exact.value(xc, yc, t)
    uqx = exact.grad_x(xc, yc, t)
    uqy = exact.grad_y(xc, yc, t)
    us = exact.value(xs[:, None], ys[None, :], t)
    un = exact.value(xb[:, None], yb[None, :], t)
    unx = exact.grad_x(xb[:, None], yb[None, :], t)
    uny = exact.grad_y(xb[:, None], yb[None, :], t)

    l2, h1, linf, nod, nodx, nody = [], [], [], [], [], []
    for c, coeff in enumerate(spline.coeffs):
        e0 = qx0 @ coeff @ qy0.T - uq[c]
        ex = qx1 @ coeff @ qy0.T - uqx[c]
        ey = qx0 @ coeff @ qy1.T - uqy[c]
        l2sq = wx @ (e0 * e0) @ wy
        seminorm = wx @ (ex * ex) @ wy + wx @ (ey * ey) @ wy
        l2.append(math.sqrt(l2sq))
        h1.append(math.sqrt(l2sq + seminorm))
        linf.append(float(np.max(np.abs(sx0 @ coeff @ sy0.T - us[c]))))
        nod.append(float(np.max(np.abs(nx0 @ coeff @ ny0.T - un[c]))))
        nodx.append(float(np.max(np.abs(nx1 @ coeff @ ny0.T - unx[c]))))
        nody.append(float(np.max(np.abs(nx0 @ coeff @ ny1.T - uny[c]))))

    return ErrorReport(tuple(l2), tuple(h1), tuple(linf), tuple(nod),
                       tuple(nodx), tuple(nody), degree=r,
                       cells=(sx.n_cells, sy.n_cells), tau=tau)


def combined_error(report: ErrorReport, kind: str) -> float:
    """Collapse the two components into the scalar the rate tables use."""
    if kind in _RSS_KINDS:
        e1, e2 = getattr(report, kind)
        return math.hypot(e1, e2)
    if kind in _MAX_KINDS:
        e1, e2 = getattr(report, kind)
        return max(e1, e2)
    raise ValueError(f"unknown norm kind {kind!r}")


def rate(e1: float, h1: float, e2: float, h2: float) -> float:
    """Observed convergence rate between meshes of width h1 and h2."""
    if h1 == h2:
        raise ValueError("rate undefined for equal mesh widths")
    if e1 <= 0.0 or e2 <= 0.0:
        raise ValueError("rate undefined for nonpositive errors")
    return math.log(e1 / e2) / math.log(h1 / h2)


@dataclass(frozen=True)
class RateTable:
    """Ordered (h, error) pairs with rates between consecutive rows."""

    hs: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def rates(self) -> tuple[Optional[float], ...]:
        out: list[Optional[float]] = [None]
        for i in range(1, len(self.hs)):
            out.append(rate(self.errors[i - 1], self.hs[i - 1],
                            self.errors[i], self.hs[i]))
        return tuple(out)
