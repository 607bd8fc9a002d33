"""cuspforge: hyperbolic structures and cusp invariants on decorated
ideal triangulations.

The package computes complete and Dehn-filled hyperbolic structures from
gluing equations, builds the exact rational dilation/translation functions
of peripheral curves on the shape variety, recovers cusp parameters and
their number fields by integer-relation detection, and tests the two
obstructions (rigid cusp field, geometric non-isolation) that rule out
hidden symmetries for surgered knot complements.
"""

from .holonomy import (
    DegenerateShapeError,
    MonomialSum,
    MuOnlyDataError,
    ShapeAssignment,
    SignedMonomial,
    cusp_parameter,
    evaluate,
    evaluate_cusp_parameter,
    mu,
    partial_derivative,
    tau,
)
from .manifold import (
    CornerRef,
    CurveVertex,
    CuspCurve,
    CuspData,
    EdgeClass,
    IdealTriangulation,
    TriangulationError,
    concat_curves,
    curve_power,
    edge_equation,
    import_exponent_matrix,
    invert_curve,
    parse_triangulation,
    serialize,
    validate,
)

__version__ = "0.1.0"


def load_fixture(name: str) -> IdealTriangulation:
    """Parse one of the bundled triangulations ('whitehead', '622', 'berge'),
    or any name resolvable through the CUSPFORGE_FIXTURES directory."""
    from .screen import resolve_input

    return parse_triangulation(resolve_input(name).read_text())

__all__ = [
    "CornerRef",
    "CurveVertex",
    "CuspCurve",
    "CuspData",
    "DegenerateShapeError",
    "EdgeClass",
    "IdealTriangulation",
    "MonomialSum",
    "MuOnlyDataError",
    "ShapeAssignment",
    "SignedMonomial",
    "TriangulationError",
    "concat_curves",
    "curve_power",
    "cusp_parameter",
    "edge_equation",
    "evaluate",
    "evaluate_cusp_parameter",
    "import_exponent_matrix",
    "invert_curve",
    "load_fixture",
    "mu",
    "parse_triangulation",
    "partial_derivative",
    "serialize",
    "tau",
    "validate",
]
