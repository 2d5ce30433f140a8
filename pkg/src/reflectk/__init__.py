"""Exact K-matrices for the type A trigonometric reflection equations."""

from reflectk.expr import ExpressionError, parse
from reflectk.linalg import Mat, MatrixFormatError, SingularMatrixError
from reflectk.scalar import ONE, ZERO, ExpressionTooLarge, PoleError, Poly, Scalar

__all__ = [
    "ExpressionError",
    "ExpressionTooLarge",
    "Mat",
    "MatrixFormatError",
    "ONE",
    "PoleError",
    "Poly",
    "Scalar",
    "SingularMatrixError",
    "ZERO",
    "parse",
]
