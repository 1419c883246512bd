"""Numerical verification of curvature and soliton identities on doubly
warped product manifolds."""

from .dwp import DoublyWarpedProduct, coordinate_lifts
from .expr import Expression, constant, parse_expression
from .geometry import ChartManifold, kulkarni_nomizu, sample_points
from .reporting import ResidualSummary, render_json
from .solitons import SolitonSpec
from .specfile import SpecFileError, load_spec

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChartManifold",
    "DoublyWarpedProduct",
    "Expression",
    "ResidualSummary",
    "SolitonSpec",
    "SpecFileError",
    "constant",
    "coordinate_lifts",
    "kulkarni_nomizu",
    "load_spec",
    "parse_expression",
    "render_json",
    "sample_points",
]
