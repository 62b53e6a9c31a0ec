"""Assembly of the 1-D collocation systems used by every solver stage.

Three operator kinds cover the whole method:

* ValueInterpolation -- value rows at the Gauss points plus value rows
  at both interval endpoints (full interpolation, order N(r-1)+2).
* NeumannInterpolation -- value rows at the Gauss points plus
  zero-first-derivative rows at the endpoints.
* HeatStep(sigma) -- rows (v - sigma * v'') at the Gauss points plus
  zero-first-derivative endpoint rows; sigma = tau*D/2 turns each
  implicit half step into a two-point boundary value problem.

Row order is always: boundary row at a, Gauss rows in increasing x,
boundary row at b, which lands exactly on the ABD layout of abd.py.
With the value/slope basis the endpoint rows are unit rows, so no extra
row scaling is needed for conditioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abd import AbdMatrix
from .mesh import SplineSpace

__all__ = [
    "ValueInterpolation",
    "NeumannInterpolation",
    "HeatStep",
    "assemble",
    "interpolation_nodes",
    "second_derivative_at_gauss",
]


@dataclass(frozen=True)
class ValueInterpolation:
    """Interpolation conditions at {a} + Gauss points + {b}."""


@dataclass(frozen=True)
class NeumannInterpolation:
    """Interpolation at the Gauss points; endpoint slopes pinned to zero."""


@dataclass(frozen=True)
class HeatStep:
    """Operator I - sigma d^2/dx^2 collocated at the Gauss points.

    sigma has units length^2 (half time step times a diffusion
    coefficient); sigma = 0 degenerates to NeumannInterpolation.
    """

    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError("sigma must be finite and >= 0")


LineOperator = ValueInterpolation | NeumannInterpolation | HeatStep


def assemble(space: SplineSpace, kind: LineOperator) -> AbdMatrix:
    """Collocation matrix for the given operator kind, in ABD storage."""
    n, r = space.n_cells, space.r
    blocks = space.colloc_blocks(0)
    if isinstance(kind, HeatStep) and kind.sigma != 0.0:
        blocks = blocks - kind.sigma * space.colloc_blocks(2)

    end_deriv = 0 if isinstance(kind, ValueInterpolation) else 1
    top = space.local_rows(0, [0.0], end_deriv)[0]
    bottom = space.local_rows(n - 1, [1.0], end_deriv)[0]
    return AbdMatrix(top, blocks, bottom)


def interpolation_nodes(space: SplineSpace, kind: LineOperator) -> np.ndarray:
    """Locations whose data the right-hand side must supply, in row order.

    ValueInterpolation consumes data at both endpoints as well; the
    derivative-condition kinds carry homogeneous boundary rows, so only
    the Gauss points take data.
    """
    pts = space.collocation.points
    if isinstance(kind, ValueInterpolation):
        return np.concatenate(([space.partition.a], pts, [space.partition.b]))
    return pts.copy()


def second_derivative_at_gauss(space: SplineSpace, coeffs: np.ndarray) -> np.ndarray:
    """Exact spline second derivative at the space's collocation points."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != space.dim:
        raise ValueError(f"coefficient vector must have length {space.dim}")
    return space.colloc_eval(2) @ coeffs
