"""ADI extrapolated Crank-Nicolson orthogonal spline collocation solver
for two-component reaction-diffusion systems on rectangles."""

from .abd import AbdFactorization, AbdMatrix, SingularMatrixError, factorize
from .errors import ErrorReport, RateTable, combined_error, error_report, rate
from .lines import (HeatStep, NeumannInterpolation, ValueInterpolation,
                    assemble, interpolation_nodes, second_derivative_at_gauss)
from .mesh import (CollocationPoints, GaussRule, Partition1D, SplineSpace,
                   basis_row, collocation_points, gauss_rule)
from .models import (KineticsError, ReactionModel, Rect, TrigExact,
                     brusselator, build_model, gierer_meinhardt, gray_scott,
                     manufactured, schnakenberg)
from .stepper import (AdiResult, AdiSolver, GaussGrid, LineFields, Spline2D,
                      TimeGrid, TimeSteppingError, extrapolate)

__version__ = "0.1.0"

__all__ = [
    "AbdFactorization", "AbdMatrix", "SingularMatrixError", "factorize",
    "ErrorReport", "RateTable", "combined_error", "error_report", "rate",
    "HeatStep", "NeumannInterpolation", "ValueInterpolation",
    "assemble", "interpolation_nodes", "second_derivative_at_gauss",
    "CollocationPoints", "GaussRule", "Partition1D", "SplineSpace",
    "basis_row", "collocation_points", "gauss_rule",
    "KineticsError", "ReactionModel", "Rect", "TrigExact",
    "brusselator", "build_model", "gierer_meinhardt", "gray_scott",
    "manufactured", "schnakenberg",
    "AdiResult", "AdiSolver", "GaussGrid", "LineFields", "Spline2D",
    "TimeGrid", "TimeSteppingError", "extrapolate",
    "__version__",
]
