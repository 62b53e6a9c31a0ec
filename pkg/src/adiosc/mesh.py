"""Partitions, Gauss rules, collocation points and the C1 spline basis.

The spatial discretization works on spaces of piecewise polynomials of
degree <= r (r >= 3) that are C1 across the breakpoints of a 1-D
partition.  The basis used here pins two degrees of freedom to every
breakpoint (function value and slope) and adds r-3 interior "bubble"
functions per subinterval, giving dimension N*(r-1) + 2 on a partition
with N subintervals.  Every basis function is supported on at most two
adjacent subintervals, so 1-D collocation matrices come out almost block
diagonal with blocks of r-1 rows by r+1 columns overlapping in exactly
two columns.

Collocation points are the nodes of the (r-1)-point Gauss-Legendre rule
mapped into each subinterval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Partition1D",
    "GaussRule",
    "CollocationPoints",
    "SplineSpace",
    "gauss_rule",
    "collocation_points",
    "basis_row",
]

_SQRT3 = math.sqrt(3.0)
_SQRT35 = math.sqrt(0.6)


@dataclass(frozen=True, eq=False)
class Partition1D:
    """Strictly increasing breakpoints x_0 < ... < x_N on [a, b]."""

    breaks: np.ndarray

    def __post_init__(self):
        br = np.asarray(self.breaks, dtype=float)
        if br.ndim != 1 or br.size < 2:
            raise ValueError("partition needs at least two breakpoints")
        if not np.all(np.diff(br) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breaks", br)
        br.setflags(write=False)

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Partition1D":
        if n < 1:
            raise ValueError("need at least one subinterval")
        if not b > a:
            raise ValueError("empty interval")
        return cls(np.linspace(a, b, n + 1))

    @property
    def a(self) -> float:
        return float(self.breaks[0])

    @property
    def b(self) -> float:
        return float(self.breaks[-1])

    @property
    def n(self) -> int:
        """Number of subintervals."""
        return self.breaks.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breaks)


@dataclass(frozen=True, eq=False)
class GaussRule:
    """Gauss-Legendre nodes/weights mapped to [0, 1]; weights sum to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_newton(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of the m-point rule on [-1, 1] by Newton iteration."""
    x = np.cos(np.pi * (np.arange(1, m + 1) - 0.25) / (m + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(2, m + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = m * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def gauss_rule(m: int) -> GaussRule:
    """m-point Gauss-Legendre rule on [0, 1], exact for degree <= 2m-1.

    The rules for m <= 3 are analytic; larger m uses Newton iteration on
    the Legendre polynomial with a 1e-15 stopping tolerance.
    """
    if not 1 <= m <= 12:
        raise ValueError(f"Gauss rule order must be in 1..12, got {m}")
    if m == 1:
        nodes, weights = [0.5], [1.0]
    elif m == 2:
        nodes = [(1.0 - 1.0 / _SQRT3) / 2.0, (1.0 + 1.0 / _SQRT3) / 2.0]
        weights = [0.5, 0.5]
    elif m == 3:
        nodes = [(1.0 - _SQRT35) / 2.0, 0.5, (1.0 + _SQRT35) / 2.0]
        weights = [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0]
    else:
        x, w = _legendre_newton(m)
        nodes = (1.0 + x) / 2.0
        weights = w / 2.0
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return GaussRule(nodes, weights)


@dataclass(frozen=True, eq=False)
class CollocationPoints:
    """Gauss nodes mapped into every subinterval, ordered by subinterval."""

    points: np.ndarray          # flat, length n*(r-1)
    per_cell: np.ndarray        # shape (n, r-1)


def collocation_points(partition: Partition1D, r: int) -> CollocationPoints:
    """Collocation points x_{i-1} + h_i * lambda_k of the (r-1)-point rule."""
    if r < 3:
        raise ValueError("spline degree must be >= 3")
    lam = gauss_rule(r - 1).nodes
    left = partition.breaks[:-1]
    per_cell = left[:, None] + partition.widths[:, None] * lam[None, :]
    flat = per_cell.reshape(-1)
    flat.setflags(write=False)
    per_cell.setflags(write=False)
    return CollocationPoints(flat, per_cell)


def _shape_coefficients(r: int) -> np.ndarray:
    """Monomial coefficients (rows: local functions, cols: powers of s).

    Local column order on a subinterval, in reference coordinate
    s in [0, 1]:

        0      value at left endpoint      1 - 3s^2 + 2s^3
        1      slope at left endpoint      s - 2s^2 + s^3      (scaled by h)
        2..r-2 bubbles                     s^2 (1-s)^2 s^(k-1)
        r-1    value at right endpoint     3s^2 - 2s^3
        r      slope at right endpoint     -s^2 + s^3          (scaled by h)

    Bubbles vanish with their first derivative at both endpoints, so the
    breakpoint value/slope columns alone carry the C1 coupling.
    """
    c = np.zeros((r + 1, r + 1))
    c[0, :4] = [1.0, 0.0, -3.0, 2.0]
    c[1, :4] = [0.0, 1.0, -2.0, 1.0]
    for k in range(1, r - 2):
        c[1 + k, k + 1:k + 4] = [1.0, -2.0, 1.0]
    c[r - 1, :4] = [0.0, 0.0, 3.0, -2.0]
    c[r, :4] = [0.0, 0.0, -1.0, 1.0]
    return c


class SplineSpace:
    """C1 piecewise-polynomial space of degree r on a 1-D partition.

    Coefficient layout: [v_0, s_0, b_{1,1}.., v_1, s_1, b_{2,1}.., ..., v_N, s_N]
    where v_i/s_i are value/slope at breakpoint x_i and b_{i,k} are the
    bubble coefficients of subinterval i.  Subinterval i sees the r+1
    consecutive coefficients starting at (i-1)*(r-1).
    """

    def __init__(self, partition: Partition1D, r: int):
        if r < 3:
            raise ValueError("spline degree must be >= 3")
        self.partition = partition
        self.r = int(r)
        self.dim = partition.n * (r - 1) + 2
        # derivative coefficient tables, index [deriv][local fn, power]
        base = _shape_coefficients(r)
        tables = [base]
        for _ in range(2):
            prev = tables[-1]
            der = prev[:, 1:] * np.arange(1, prev.shape[1])[None, :]
            tables.append(der)
        self._coef = tables
        self._colloc = collocation_points(partition, r)
        self._colloc_eval: dict[int, np.ndarray] = {}
        self._colloc_blocks: dict[int, np.ndarray] = {}

    @property
    def n_cells(self) -> int:
        return self.partition.n

    @property
    def collocation(self) -> CollocationPoints:
        return self._colloc

    @property
    def n_colloc(self) -> int:
        return self._colloc.points.size

    def _local_values(self, cells: np.ndarray, s: np.ndarray, deriv: int) -> np.ndarray:
        """Values of the r+1 local functions at reference coords s.

        cells and s have equal shape; returns shape s.shape + (r+1,).
        The d-th x-derivative divides by h^d; slope columns carry an
        extra factor h so that the global slope dof is du/dx at the node.
        """
        if deriv not in (0, 1, 2):
            raise ValueError("deriv must be 0, 1 or 2")
        coef = self._coef[deriv]
        h = self.partition.widths[cells]
        vals = np.empty(s.shape + (self.r + 1,))
        for j in range(self.r + 1):
            vals[..., j] = np.polynomial.polynomial.polyval(s, coef[j])
        vals[..., 1] *= h
        vals[..., self.r] *= h
        if deriv:
            vals /= (h ** deriv)[..., None]
        return vals

    def _locate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map points to (cell index, reference coordinate).

        Interior breakpoints resolve to their left cell; for deriv <= 1
        the basis is continuous so the choice is immaterial there.
        """
        br = self.partition.breaks
        if np.any(x < br[0]) or np.any(x > br[-1]):
            raise ValueError("evaluation point outside the partition interval")
        idx = np.searchsorted(br, x, side="left")
        idx = np.clip(idx, 1, self.partition.n)
        cells = idx - 1
        s = (x - br[cells]) / self.partition.widths[cells]
        return cells, s

    def eval_matrix(self, x, deriv: int = 0) -> np.ndarray:
        """Rows of basis (derivative) values at the points x, shape (len(x), dim)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        cells, s = self._locate(x)
        vals = self._local_values(cells, s, deriv)
        rows = np.zeros((x.size, self.dim))
        offs = cells * (self.r - 1)
        cols = offs[:, None] + np.arange(self.r + 1)[None, :]
        rows[np.arange(x.size)[:, None], cols] = vals
        return rows

    def eval_matrix_cellwise(self, offsets) -> tuple[np.ndarray, list[np.ndarray]]:
        """Evaluation points and basis rows at fixed offsets in every cell.

        offsets are reference coordinates in [0, 1], applied to every
        subinterval in turn (cell membership is forced, so offset 1.0
        evaluates from within the cell rather than its right neighbor).
        Returns (points, [rows_deriv0, rows_deriv1]) with n*len(offsets)
        rows grouped by cell.
        """
        offsets = np.asarray(offsets, dtype=float)
        n, r = self.partition.n, self.r
        cells = np.repeat(np.arange(n), offsets.size)
        s = np.tile(offsets, n)
        pts = self.partition.breaks[cells] + self.partition.widths[cells] * s
        mats = []
        for deriv in (0, 1):
            vals = self._local_values(cells, s, deriv)
            rows = np.zeros((pts.size, self.dim))
            offs = cells * (r - 1)
            cols = offs[:, None] + np.arange(r + 1)[None, :]
            rows[np.arange(pts.size)[:, None], cols] = vals
            mats.append(rows)
        return pts, mats

    def colloc_eval(self, deriv: int) -> np.ndarray:
        """Basis rows at the collocation points, cached per derivative order."""
        if deriv not in self._colloc_eval:
            mat = self.eval_matrix(self._colloc.points, deriv)
            mat.setflags(write=False)
            self._colloc_eval[deriv] = mat
        return self._colloc_eval[deriv]

    def colloc_blocks(self, deriv: int) -> np.ndarray:
        """Local basis values at the Gauss points of every cell.

        Shape (n, r-1, r+1): the nonzero window of colloc_eval row-blocks,
        which is also the interior block of the collocation ABD matrices.
        """
        if deriv not in self._colloc_blocks:
            lam = gauss_rule(self.r - 1).nodes
            n = self.partition.n
            cells = np.repeat(np.arange(n), lam.size)
            s = np.tile(lam, n)
            vals = self._local_values(cells, s, deriv)
            blk = vals.reshape(n, self.r - 1, self.r + 1)
            blk.setflags(write=False)
            self._colloc_blocks[deriv] = blk
        return self._colloc_blocks[deriv]

    def local_rows(self, cell: int, s, deriv: int = 0) -> np.ndarray:
        """Local (r+1)-column rows at reference coords s within one cell."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        cells = np.full(s.shape, cell, dtype=int)
        return self._local_values(cells, s, deriv)


def basis_row(space: SplineSpace, x: float, deriv: int = 0) -> np.ndarray:
    """Single basis-value row at x (at most r+1 nonzeros)."""
    return space.eval_matrix([x], deriv)[0]
