"""Deformation theory over ``hbar C[hbar] / hbar^(N+1)``.

A :class:`Carrier` supplies the graded Lie algebra ``g`` (zero, addition,
scaling, bracket, differential, zero test).  :class:`TruncatedElement`
holds the coefficients of ``hbar^1 .. hbar^N``; brackets convolve and drop
everything beyond ``hbar^N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Iterator, List, Optional, Tuple

from .algebra import DiffPoly, JetContext, schouten_degree, schouten_finite
from .brackets import ConeElement, LocalFunctional, cone_bracket, cone_diff, lambda_bracket, schouten_local
from .euclid import EuclidElement, g_bracket
from .hamiltonian import Metric


# -- carriers --------------------------------------------------------------------


class Carrier:
    """A graded Lie algebra with differential; elements are opaque values."""

    name = "abstract"

    def zero(self) -> Any:
        raise NotImplementedError

    def add(self, x, y):
        return x + y

    def scale(self, x, c):
        return x.scale(c)

    def bracket(self, x, y):
        raise NotImplementedError

    def d(self, x):
        return self.zero()

    def is_zero(self, x) -> bool:
        raise NotImplementedError

    def degree(self, x) -> Optional[int]:
        raise NotImplementedError

    def sub(self, x, y):
        return self.add(x, self.scale(y, -1))

    def equal(self, x, y) -> bool:
        return self.is_zero(self.sub(x, y))


class SchoutenCarrier(Carrier):
    """Jet-order-zero multivectors with the finite Schouten bracket; ``d = [base, -]``."""

    name = "schouten"

    def __init__(self, ctx: JetContext, base: Optional[DiffPoly] = None):
        self.ctx = ctx
        self.base = base

    def zero(self):
        return self.ctx.zero()

    def bracket(self, x, y):
        return schouten_finite(x, y)

    def d(self, x):
        if self.base is None or not x:
            return self.ctx.zero()
        return schouten_finite(self.base, x)

    def is_zero(self, x) -> bool:
        return not x

    def degree(self, x):
        return schouten_degree(x) if x else None


class JetCarrier(SchoutenCarrier):
    """The jet algebra with its bracket; ``d = [base, -]``."""

    name = "jet"

    def bracket(self, x, y):
        return lambda_bracket(x, y)

    def d(self, x):
        if self.base is None or not x:
            return self.ctx.zero()
        return lambda_bracket(self.base, x)


class LocalCarrier(Carrier):
    """Local functionals with the variational Schouten bracket; ``d = [[base, -]]``."""

    name = "local"

    def __init__(self, ctx: JetContext, base: Optional[LocalFunctional] = None):
        self.ctx = ctx
        self.base = base

    def zero(self):
        return LocalFunctional(self.ctx.zero())

    def bracket(self, x, y):
        return schouten_local(x, y)

    def d(self, x):
        if self.base is None:
            return self.zero()
        return schouten_local(self.base, x)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def degree(self, x):
        return x.degree() if x.rep else None


class ConeCarrier(Carrier):
    """The cone with ``d = D + [base, -]``."""

    name = "cone"

    def __init__(self, ctx: JetContext, base: Optional[ConeElement] = None):
        self.ctx = ctx
        self.base = base

    def zero(self):
        return ConeElement.of(self.ctx.zero())

    def bracket(self, x, y):
        return cone_bracket(x, y)

    def d(self, x):
        out = cone_diff(x)
        if self.base is not None:
            out = out + cone_bracket(self.base, x)
        return out

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def degree(self, x):
        return x.degree()


class EuclidCarrier(Carrier):
    """``g(V, eta)``, finite-dimensional; ``d = [base, -]`` for a Maurer-Cartan ``base``."""

    name = "euclid"

    def __init__(self, metric: Metric, base: Optional[EuclidElement] = None):
        self.metric = metric
        self.base = base

    def zero(self):
        return EuclidElement.make(self.metric)

    def bracket(self, x, y):
        return g_bracket(x, y)

    def d(self, x):
        if self.base is None:
            return self.zero()
        return g_bracket(self.base, x)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def degree(self, x):
        return x.degree()


class MatrixCarrier(Carrier):
    """Square rational matrices in degree zero with the commutator; ``d = 0``."""

    name = "matrix"

    def __init__(self, size: int):
        self.size = size

    def zero(self):
        return tuple(tuple(Fraction(0) for _ in range(self.size)) for _ in range(self.size))

    def add(self, x, y):
        return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(x, y))

    def scale(self, x, c):
        c = Fraction(c)
        return tuple(tuple(a * c for a in r) for r in x)

    @staticmethod
    def matmul(x, y):
        n = len(x)
        return tuple(tuple(sum((x[i][k] * y[k][j] for k in range(n)), Fraction(0)) for j in range(n)) for i in range(n))

    def bracket(self, x, y):
        return self.sub(self.matmul(x, y), self.matmul(y, x))

    def is_zero(self, x) -> bool:
        return not any(any(r) for r in x)

    def degree(self, x):
        return None if self.is_zero(x) else 0


# -- truncated elements ----------------------------------------------------------


class TruncationMismatch(ValueError):
    pass


class DegreeError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedElement:
    """``sum_{i=1..N} hbar^i coeffs[i-1]`` with carrier coefficients."""

    carrier: Carrier
    coeffs: Tuple[Any, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("truncation order must be at least 1")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def zero(cls, carrier: Carrier, order: int) -> "TruncatedElement":
        return cls(carrier, tuple(carrier.zero() for _ in range(order)))

    @classmethod
    def single(cls, carrier: Carrier, order: int, power: int, value) -> "TruncatedElement":
        coeffs = [carrier.zero() for _ in range(order)]
        if power <= order:
            coeffs[power - 1] = value
        return cls(carrier, tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def _check(self, other: "TruncatedElement") -> None:
        if self.order != other.order:
            raise TruncationMismatch(f"orders {self.order} and {other.order}")
        if self.carrier is not other.carrier:
            raise TruncationMismatch("different carriers")

    def degree(self) -> Optional[int]:
        degs = {self.carrier.degree(c) for c in self.coeffs if not self.carrier.is_zero(c)}
        degs.discard(None)
        if len(degs) > 1:
            raise DegreeError(f"inhomogeneous truncated element: degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def is_zero(self) -> bool:
        return all(self.carrier.is_zero(c) for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        self._check(other)
        return all(self.carrier.equal(a, b) for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def __add__(self, other: "TruncatedElement") -> "TruncatedElement":
        self._check(other)
        return TruncatedElement(self.carrier, tuple(self.carrier.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TruncatedElement") -> "TruncatedElement":
        self._check(other)
        return TruncatedElement(self.carrier, tuple(self.carrier.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncatedElement":
        return self.scale(-1)

    def scale(self, c) -> "TruncatedElement":
        return TruncatedElement(self.carrier, tuple(self.carrier.scale(a, c) for a in self.coeffs))

    def low_order(self) -> int:
        """Smallest ``i`` with a nonzero ``hbar^i`` coefficient (``N+1`` for zero)."""
        for i, c in enumerate(self.coeffs, 1):
            if not self.carrier.is_zero(c):
                return i
        return self.order + 1


def bracket(x: TruncatedElement, y: TruncatedElement) -> TruncatedElement:
    x._check(y)
    car, n = x.carrier, x.order
    out = [car.zero() for _ in range(n)]
    for i, a in enumerate(x.coeffs, 1):
        if car.is_zero(a):
            continue
        for j, b in enumerate(y.coeffs, 1):
            if i + j > n:
                break
            if car.is_zero(b):
                continue
            out[i + j - 1] = car.add(out[i + j - 1], car.bracket(a, b))
    return TruncatedElement(car, tuple(out))


def differential(x: TruncatedElement) -> TruncatedElement:
    return TruncatedElement(x.carrier, tuple(x.carrier.d(c) for c in x.coeffs))


def _require_degree(x: TruncatedElement, deg: int, what: str) -> None:
    d = x.degree()
    if d is not None and d != deg:
        raise DegreeError(f"{what} must have degree {deg}, got {d}")


def curvature(A: TruncatedElement) -> TruncatedElement:
    """``Q(A) = dA + 1/2 [A, A]``; gauge transforms it by ``e^(ad X)``."""
    _require_degree(A, 1, "A")
    return differential(A) + bracket(A, A).scale(Fraction(1, 2))


def is_maurer_cartan(A: TruncatedElement) -> bool:
    return curvature(A).is_zero()


def d_A(A: TruncatedElement, x: TruncatedElement) -> TruncatedElement:
    """``d_A x = dx + [A, x]``."""
    return differential(x) + bracket(A, x)


def ad_power_series(X: TruncatedElement, w: TruncatedElement, coeff: Callable[[int], Fraction]) -> TruncatedElement:
    """``sum_n coeff(n) ad(X)^n w``, truncated: each ``ad X`` raises the hbar order."""
    out = w.scale(coeff(0))
    term = w
    low = X.low_order()
    n = 0
    while True:
        n += 1
        if term.is_zero() or low * n > X.order:
            break
        term = bracket(X, term)
        c = coeff(n)
        if c:
            out = out + term.scale(c)
    return out


def exp_ad(X: TruncatedElement, w: TruncatedElement) -> TruncatedElement:
    """``e^(ad X) w``."""
    return ad_power_series(X, w, lambda n: Fraction(1, factorial(n)))


def gauge_act(X: TruncatedElement, A: TruncatedElement) -> TruncatedElement:
    """``exp(X) * A = A - sum_n ad(X)^n / (n+1)! d_A X``."""
    _require_degree(X, 0, "X")
    _require_degree(A, 1, "A")
    return A - ad_power_series(X, d_A(A, X), lambda n: Fraction(1, factorial(n + 1)))


def bracket_A(A: TruncatedElement, u: TruncatedElement, v: TruncatedElement) -> TruncatedElement:
    """``{u, v}_A = [d_A u, v]`` on degree -1."""
    _require_degree(A, 1, "A")
    _require_degree(u, -1, "u")
    _require_degree(v, -1, "v")
    return bracket(d_A(A, u), v)


def derived_bracket(carrier: Carrier, A, u, v):
    """``[d_A u, v]`` directly in the carrier, with no hbar truncation."""
    dAu = carrier.add(carrier.d(u), carrier.bracket(A, u))
    return carrier.bracket(dAu, v)


def carrier_curvature(carrier: Carrier, A):
    return carrier.add(carrier.d(A), carrier.scale(carrier.bracket(A, A), Fraction(1, 2)))


# -- Baker-Campbell-Hausdorff ----------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Sequences of ``parts`` pairs ``(r_i, s_i)`` with ``r_i + s_i > 0`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for r in range(first + 1):
            for rest in _compositions(total - first, parts - 1):
                yield ((r, first - r),) + rest


def bch_general(X: TruncatedElement, Y: TruncatedElement, br: Callable) -> TruncatedElement:
    """Dynkin's series for ``log(e^X e^Y)`` with bracket ``br``.

    Words longer than ``N`` vanish, because every letter carries at least one
    power of hbar.
    """
    X._check(Y)
    N = X.order
    out = X + Y
    for length in range(2, N + 1):
        for parts in range(1, length + 1):
            sign = Fraction((-1) ** (parts - 1), parts)
            for seq in _compositions(length, parts):
                r_last, s_last = seq[-1]
                if s_last > 1 or (s_last == 0 and r_last > 1):
                    continue
                letters: List[TruncatedElement] = []
                denom = length
                for r, s in seq:
                    letters.extend([X] * r + [Y] * s)
                    denom *= factorial(r) * factorial(s)
                word = letters[-1]
                for letter in reversed(letters[:-1]):
                    word = br(letter, word)
                    if word.is_zero():
                        break
                if not word.is_zero():
                    out = out + word.scale(sign / denom)
    return out


def bch(X: TruncatedElement, Y: TruncatedElement) -> TruncatedElement:
    """``log(exp(X) exp(Y))`` for degree-0 truncated elements."""
    _require_degree(X, 0, "X")
    _require_degree(Y, 0, "Y")
    return bch_general(X, Y, bracket)


def bch_A(A: TruncatedElement, u: TruncatedElement, v: TruncatedElement) -> TruncatedElement:
    """The group law of ``exp(g_A)``: BCH for the bracket ``{-,-}_A``."""
    return bch_general(u, v, lambda x, y: bracket_A(A, x, y))


# -- 2-morphisms -------------------------------------------------------------------


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class TwoMorphism:
    """``(exp_A(u), exp(X), A)``: a 2-morphism from ``exp(X)`` to ``exp(X) exp(d_A u)``."""

    u: TruncatedElement
    X: TruncatedElement
    A: TruncatedElement

    @classmethod
    def identity(cls, X: TruncatedElement, A: TruncatedElement) -> "TwoMorphism":
        return cls(TruncatedElement.zero(A.carrier, A.order), X, A)

    @property
    def source(self) -> TruncatedElement:
        return self.X

    @property
    def target(self) -> TruncatedElement:
        return bch(self.X, d_A(self.A, self.u))

    @property
    def target_object(self) -> TruncatedElement:
        return gauge_act(self.X, self.A)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoMorphism):
            return NotImplemented
        return self.u == other.u and self.X == other.X and self.A == other.A

    __hash__ = None


def compose_vertical(second: TwoMorphism, first: TwoMorphism) -> TwoMorphism:
    """``(exp_A v, exp X exp d_A u, A) o_v (exp_A u, exp X, A) = (exp_A u exp_A v, exp X, A)``."""
    if not (second.A == first.A and second.X == first.target):
        raise NotComposable("vertical composition needs matching object and 1-morphism")
    return TwoMorphism(bch_A(first.A, first.u, second.u), first.X, first.A)


def compose_horizontal(outer: TwoMorphism, inner: TwoMorphism) -> TwoMorphism:
    """``(exp_B v, exp Y, B) o_h (exp_A u, exp X, A) = (exp_A(e^(-ad X) v) exp_A u, exp Y exp X, A)``

    with ``B = exp(X) * A``.
    """
    if not outer.A == gauge_act(inner.X, inner.A):
        raise NotComposable("horizontal composition needs B = exp(X) * A")
    v = exp_ad(inner.X.scale(-1), outer.u)
    return TwoMorphism(bch_A(inner.A, v, inner.u), bch(outer.X, inner.X), inner.A)
