"""Exact rational matrix helpers backed by sympy."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def _to_sympy(rows: Sequence[Sequence]):
    import sympy

    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows])


def _from_sympy(mat) -> Matrix:
    return [[Fraction(int(x.p), int(x.q)) for x in mat.row(i)] for i in range(mat.rows)]


def det(rows: Sequence[Sequence]) -> Fraction:
    d = _to_sympy(rows).det()
    return Fraction(int(d.p), int(d.q))


def inverse(rows: Sequence[Sequence]) -> Matrix:
    return _from_sympy(_to_sympy(rows).inv())
