"""Exact computations for the non-graded Virasoro-like Lie algebra and its
two-cell modules with one-dimensional weight spaces."""

from virlike.scalars import Scalar, format_rational, parse_rational
from virlike.algebra import (
    CENTRAL,
    Basis,
    LieElement,
    bracket,
    bracket_basis,
    central_cocycle,
    element_combine,
    jacobi_defect,
)

__all__ = [
    "CENTRAL",
    "Basis",
    "LieElement",
    "Scalar",
    "bracket",
    "bracket_basis",
    "central_cocycle",
    "element_combine",
    "format_rational",
    "jacobi_defect",
    "parse_rational",
]

__version__ = "0.1.0"
