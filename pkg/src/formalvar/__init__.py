"""Exact formal calculus of variations on jet superspaces."""

from .algebra import (
    ContextMismatch,
    DiffPoly,
    JetContext,
    JetVariable,
    NotHomogeneous,
    PoissonTensor,
    Verdict,
    gradings,
    mul,
    partial,
)
from .exprparse import ParseError, format_poly, parse

__version__ = "0.1.0"

__all__ = [
    "ContextMismatch",
    "DiffPoly",
    "JetContext",
    "JetVariable",
    "NotHomogeneous",
    "ParseError",
    "PoissonTensor",
    "Verdict",
    "format_poly",
    "gradings",
    "mul",
    "parse",
    "partial",
]
