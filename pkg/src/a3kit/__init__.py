"""Numerical toolkit for monogenic functions with values in the algebra A3."""

from .algebra import (
    ONE,
    RHO,
    RHO2,
    ZERO,
    A3Element,
    RadicalElement,
    cos_a3,
    exp_a3,
    functional_f,
    invert,
    log_a3,
    mul,
    norm,
    powi_a3,
    radical_part,
    sin_a3,
)
from .decomposition import ComponentTable, fiber_constancy, fit_polynomial, peel, square_grid
from .extension import (
    Contour,
    MonogenicTriple,
    build_monogenic,
    default_contour,
    extend_contour,
    extend_jet,
    resolvent,
)
from .frame import CanonicalTriple, E3Frame, canonical_triple, embed, fiber_direction, validate_frame
from .holo import HoloExpr, JetValue, diff, eval_a3, eval_c, jet, parse_expr, to_text
from .monogenicity import (
    Box,
    DirectionSet,
    FieldSampler,
    check_monogenic,
    directional_derivative,
    frame_directions,
    local_boundedness,
    radical_direction_vanishing,
    standard_directions,
    tolstov_residual,
)

__version__ = "0.1.0"
