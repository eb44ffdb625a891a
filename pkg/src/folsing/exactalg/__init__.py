"""Exact arithmetic: rationals, number fields, sparse polynomials, series."""

from .numbers import (
    QQ,
    AlgebraicScalar,
    ContextMismatch,
    ExactAlgError,
    NumberField,
    Q,
    ReducibleMinimalPolynomial,
    UnsupportedField,
    adjoin_root,
    common_field,
    fmt_rational,
    fmt_scalar,
    is_rational,
    rational_sqrt,
    scalar_field,
)
from .parse import ParseError, parse_form_parts, parse_poly
from .poly import MultiPoly, NotDivisible, PolyError, poly_ring
from .resultant import discriminant, poly_gcd, resultant
from .series import (
    TruncationError,
    TruncSeries,
    implicit_series_solve,
    residue_at_origin,
    vanishing_order,
)

__all__ = [
    "QQ",
    "AlgebraicScalar",
    "ContextMismatch",
    "ExactAlgError",
    "NumberField",
    "Q",
    "ReducibleMinimalPolynomial",
    "UnsupportedField",
    "adjoin_root",
    "common_field",
    "fmt_rational",
    "fmt_scalar",
    "is_rational",
    "rational_sqrt",
    "scalar_field",
    "ParseError",
    "parse_form_parts",
    "parse_poly",
    "MultiPoly",
    "NotDivisible",
    "PolyError",
    "poly_ring",
    "discriminant",
    "poly_gcd",
    "resultant",
    "TruncationError",
    "TruncSeries",
    "implicit_series_solve",
    "residue_at_origin",
    "vanishing_order",
]
