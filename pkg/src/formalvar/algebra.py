"""Exact graded-commutative polynomials in even and odd jet variables.

A :class:`DiffPoly` is a finite sum of monomials with exact rational
coefficients.  Even jet variables ``t[a,k]`` commute with everything; odd
jet variables ``th[b,k]`` anticommute among themselves and square to zero.
Odd factors of a monomial are stored sorted, so every sign in the engine
comes from the permutation that sorts them.

Variables are packed into integers ``(index << 16) | order``; sorting the
packed ids sorts by ``(index, order)``.  Even and odd variables live in
separate id spaces.

The jet-order-zero part of the module also carries the finite-dimensional
Poisson and Schouten brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Coeff = Union[int, Fraction]
# ((even_id, exponent), ...) sorted by id, (odd_id, ...) sorted
Monomial = Tuple[Tuple[Tuple[int, int], ...], Tuple[int, ...]]

ORDER_BITS = 16
ORDER_MASK = (1 << ORDER_BITS) - 1
ONE_MONOMIAL: Monomial = ((), ())


class ContextMismatch(ValueError):
    """Operands live on different jet superspaces."""


class NotHomogeneous(ValueError):
    """A graded-homogeneous input was required."""


class JetOrderError(ValueError):
    """A jet-order-zero input was required."""


def var_id(index: int, order: int) -> int:
    return (index << ORDER_BITS) | order


def var_index(vid: int) -> int:
    return vid >> ORDER_BITS


def var_order(vid: int) -> int:
    return vid & ORDER_MASK


def normalize_coeff(c) -> Coeff:
    """Coerce a number to an int or a Fraction; floats are refused."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return normalize_coeff(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return normalize_coeff(Fraction(c))
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


@dataclass(frozen=True)
class JetVariable:
    """One jet coordinate: ``t[index, order]`` (even) or ``th[index, order]`` (odd)."""

    odd: bool
    index: int
    order: int = 0

    def __post_init__(self):
        if self.index < 1 or self.order < 0:
            raise ValueError(f"bad jet variable {self!r}")
        if self.order > ORDER_MASK:
            raise ValueError("jet order too large")

    @property
    def vid(self) -> int:
        return var_id(self.index, self.order)

    @property
    def parity(self) -> int:
        return 1 if self.odd else 0

    def shifted(self, by: int) -> "JetVariable":
        return JetVariable(self.odd, self.index, self.order + by)

    def __str__(self) -> str:
        return f"{'th' if self.odd else 't'}{self.index}_{self.order}"


@dataclass(frozen=True)
class JetContext:
    """A jet superspace with ``even_count`` even and ``odd_count`` odd base coordinates."""

    even_count: int
    odd_count: int = 0

    def __post_init__(self):
        if self.even_count < 1 or self.odd_count < 0:
            raise ValueError(f"need m >= 1 and n >= 0, got {self.even_count},{self.odd_count}")

    @classmethod
    def omega(cls, m: int) -> "JetContext":
        """The context of Omega X over an m-dimensional base: th[a] is dual to t[a]."""
        return cls(m, m)

    @property
    def is_omega(self) -> bool:
        return self.even_count == self.odd_count

    def check_variable(self, x: JetVariable) -> None:
        bound = self.odd_count if x.odd else self.even_count
        if x.index > bound:
            raise ValueError(f"variable {x} lies outside context ({self.even_count},{self.odd_count})")

    def t(self, a: int, k: int = 0) -> "DiffPoly":
        x = JetVariable(False, a, k)
        self.check_variable(x)
        return DiffPoly._raw(self, {(((x.vid, 1),), ()): 1})

    def th(self, b: int, k: int = 0) -> "DiffPoly":
        x = JetVariable(True, b, k)
        self.check_variable(x)
        return DiffPoly._raw(self, {((), (x.vid,)): 1})

    def var(self, x: JetVariable) -> "DiffPoly":
        return self.th(x.index, x.order) if x.odd else self.t(x.index, x.order)

    def const(self, c) -> "DiffPoly":
        c = normalize_coeff(c)
        return DiffPoly._raw(self, {ONE_MONOMIAL: c} if c else {})

    def zero(self) -> "DiffPoly":
        return DiffPoly._raw(self, {})

    def one(self) -> "DiffPoly":
        return self.const(1)

    def base_coordinates(self) -> List[JetVariable]:
        """Jet-order-zero coordinates: even ones first, then odd ones."""
        return [JetVariable(False, a) for a in range(1, self.even_count + 1)] + [
            JetVariable(True, b) for b in range(1, self.odd_count + 1)
        ]


def sort_odd(factors: Sequence[int]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Sort odd factors, returning the Koszul sign; ``(0, None)`` on a repeat."""
    items = list(factors)
    sign = 1
    # insertion sort: n is tiny and we need the transposition count
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(items)):
        if items[i - 1] == items[i]:
            return 0, None
    return sign, tuple(items)


def make_monomial(even: Mapping[int, int], odd: Sequence[int]) -> Tuple[int, Optional[Monomial]]:
    """Build a canonical monomial from an even-exponent map and a list of odd ids."""
    sign, odds = sort_odd(odd)
    if not sign:
        return 0, None
    evens = tuple(sorted((v, e) for v, e in even.items() if e))
    if any(e < 0 for _, e in evens):
        raise ValueError("negative exponent")
    return sign, (evens, odds)


@lru_cache(maxsize=1 << 18)
def mono_mul(m1: Monomial, m2: Monomial) -> Tuple[int, Optional[Monomial]]:
    e1, o1 = m1
    e2, o2 = m2
    if o1 and o2:
        sign = 1
        seen = set(o1)
        for b in o2:
            if b in seen:
                return 0, None
        # count pairs (a in o1, b in o2) with a > b
        inv = 0
        j = 0
        n1 = len(o1)
        for b in o2:
            while j < n1 and o1[j] < b:
                j += 1
            inv += n1 - j
        if inv & 1:
            sign = -1
        odds = tuple(sorted(o1 + o2))
    else:
        sign = 1
        odds = o1 or o2
    if e1 and e2:
        acc = dict(e1)
        for v, e in e2:
            acc[v] = acc.get(v, 0) + e
        evens = tuple(sorted(acc.items()))
    else:
        evens = e1 or e2
    return sign, (evens, odds)


def mono_theta_degree(m: Monomial) -> int:
    return len(m[1])


def mono_max_order(m: Monomial) -> int:
    best = -1
    for v, _ in m[0]:
        o = v & ORDER_MASK
        if o > best:
            best = o
    for v in m[1]:
        o = v & ORDER_MASK
        if o > best:
            best = o
    return best


class DiffPoly:
    """An exact-rational element of the graded jet algebra.

    Values are immutable.  ``terms`` maps canonical monomials to nonzero
    coefficients (``int`` or ``Fraction``).
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: JetContext, terms: Optional[Mapping[Monomial, Coeff]] = None):
        clean: Dict[Monomial, Coeff] = {}
        for mono, c in (terms or {}).items():
            c = normalize_coeff(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
                if not clean[mono]:
                    del clean[mono]
        self.ctx = ctx
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx: JetContext, terms: Dict[Monomial, Coeff]) -> "DiffPoly":
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        obj._hash = None
        return obj

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        return self.ctx.const(other)

    def __add__(self, other) -> "DiffPoly":
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return DiffPoly._raw(self.ctx, acc)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "DiffPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "DiffPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "DiffPoly":
        c = normalize_coeff(c)
        if not c:
            return self.ctx.zero()
        if c == 1:
            return self
        return DiffPoly._raw(self.ctx, {m: _norm(v * c) for m, v in self.terms.items()})

    def __mul__(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> "DiffPoly":
        return self.scale(other)

    def __truediv__(self, other) -> "DiffPoly":
        return self.scale(Fraction(1) / Fraction(normalize_coeff(other)))

    def __pow__(self, n: int) -> "DiffPoly":
        if n < 0:
            raise ValueError("negative power")
        out = self.ctx.one()
        for _ in range(n):
            out = out * self
        return out

    # -- comparison -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE_MONOMIAL: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Coeff]]:
        return iter(self.terms.items())

    def __repr__(self) -> str:
        from .exprparse import format_poly

        return f"DiffPoly({format_poly(self)!r})"

    def __str__(self) -> str:
        from .exprparse import format_poly

        return format_poly(self)

    # -- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Coeff:
        return self.terms.get(ONE_MONOMIAL, 0)

    def is_constant(self) -> bool:
        return all(m == ONE_MONOMIAL for m in self.terms)

    def max_order(self) -> int:
        """Highest jet order present, ``-1`` for constants."""
        best = -1
        for m in self.terms:
            o = mono_max_order(m)
            if o > best:
                best = o
        return best

    def theta_degrees(self) -> set:
        return {len(m[1]) for m in self.terms}

    def theta_degree(self) -> int:
        degs = self.theta_degrees()
        if len(degs) > 1:
            raise NotHomogeneous(f"mixed theta degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def parity(self) -> int:
        pars = {d & 1 for d in self.theta_degrees()}
        if len(pars) > 1:
            raise NotHomogeneous("mixed parity")
        return pars.pop() if pars else 0

    def variables(self) -> List[JetVariable]:
        seen = set()
        for evens, odds in self.terms:
            for v, _ in evens:
                seen.add((False, v))
            for v in odds:
                seen.add((True, v))
        return [JetVariable(odd, var_index(v), var_order(v)) for odd, v in sorted(seen)]

    def without_constant(self) -> "DiffPoly":
        if ONE_MONOMIAL not in self.terms:
            return self
        acc = dict(self.terms)
        del acc[ONE_MONOMIAL]
        return DiffPoly._raw(self.ctx, acc)

    def in_context(self, ctx: JetContext) -> "DiffPoly":
        """Reinterpret in a larger context (variable ids are context-free)."""
        for x in self.variables():
            ctx.check_variable(x)
        return DiffPoly._raw(ctx, dict(self.terms))


def _norm(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def check_same_context(*polys: DiffPoly) -> JetContext:
    ctx = polys[0].ctx
    for p in polys[1:]:
        if p.ctx != ctx:
            raise ContextMismatch(f"{ctx} vs {p.ctx}")
    return ctx


def mul(u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """Graded-commutative product."""
    ctx = check_same_context(u, v)
    acc: Dict[Monomial, Coeff] = {}
    for m1, c1 in u.terms.items():
        for m2, c2 in v.terms.items():
            sign, m = mono_mul(m1, m2)
            if not sign:
                continue
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                del acc[m]
    return DiffPoly._raw(ctx, {m: _norm(c) for m, c in acc.items()})


def add_into(acc: Dict[Monomial, Coeff], terms: Iterable[Tuple[Monomial, Coeff]], factor: Coeff = 1) -> None:
    """Accumulate ``factor * terms`` into a coefficient dict in place."""
    for m, c in terms:
        s = acc.get(m, 0) + c * factor
        if s:
            acc[m] = s
        else:
            acc.pop(m, None)


def from_terms(ctx: JetContext, acc: Dict[Monomial, Coeff]) -> DiffPoly:
    return DiffPoly._raw(ctx, {m: _norm(c) for m, c in acc.items() if c})


def linear_combination(ctx: JetContext, pairs: Iterable[Tuple[Coeff, DiffPoly]]) -> DiffPoly:
    acc: Dict[Monomial, Coeff] = {}
    for c, p in pairs:
        if c:
            add_into(acc, p.terms.items(), c)
    return from_terms(ctx, acc)


# -- partial derivatives --------------------------------------------------


def _mono_partial_even(m: Monomial, vid: int) -> Tuple[int, Optional[Monomial]]:
    evens, odds = m
    for i, (v, e) in enumerate(evens):
        if v == vid:
            if e == 1:
                rest = evens[:i] + evens[i + 1:]
            else:
                rest = evens[:i] + ((v, e - 1),) + evens[i + 1:]
            return e, (rest, odds)
        if v > vid:
            break
    return 0, None


def _mono_partial_odd(m: Monomial, vid: int) -> Tuple[int, Optional[Monomial]]:
    evens, odds = m
    for i, v in enumerate(odds):
        if v == vid:
            return (-1 if i & 1 else 1), (evens, odds[:i] + odds[i + 1:])
        if v > vid:
            break
    return 0, None


def partial_id(u: DiffPoly, odd: bool, vid: int) -> DiffPoly:
    """Derivative by a packed variable id; left derivative for odd variables."""
    fn = _mono_partial_odd if odd else _mono_partial_even
    acc: Dict[Monomial, Coeff] = {}
    for m, c in u.terms.items():
        f, dm = fn(m, vid)
        if f:
            s = acc.get(dm, 0) + c * f
            if s:
                acc[dm] = s
            else:
                del acc[dm]
    return DiffPoly._raw(u.ctx, acc)


def partial(u: DiffPoly, x: JetVariable) -> DiffPoly:
    """Partial derivative by a jet variable.

    Odd variables use the left derivative: the factor is commuted to the
    front of each monomial (collecting the Koszul sign) and removed.
    """
    return partial_id(u, x.odd, x.vid)


def gradings(u: DiffPoly) -> Tuple[int, int, int]:
    """``(parity, theta_degree, schouten_degree)`` of a homogeneous element."""
    d = u.theta_degree()
    return d & 1, d, d - 1


def schouten_degree(u: DiffPoly) -> int:
    return u.theta_degree() - 1


def require_order_zero(*polys: DiffPoly) -> None:
    for p in polys:
        if p.max_order() > 0:
            raise JetOrderError("jet-order-0 input required")


# -- finite Poisson tensors -----------------------------------------------


@dataclass(frozen=True)
class PoissonTensor:
    """A nu-Poisson two-tensor on the jet-order-zero coordinates of ``ctx``.

    Coordinates are indexed ``0..m+n-1``: the even ``t[1..m]`` first, then
    the odd ``th[1..n]``.  Each entry must be homogeneous of parity
    ``|a| + |b| + nu``.
    """

    ctx: JetContext
    parity: int
    entries: Tuple[Tuple[DiffPoly, ...], ...]

    def __post_init__(self):
        size = self.ctx.even_count + self.ctx.odd_count
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if len(self.entries) != size or any(len(row) != size for row in self.entries):
            raise ValueError(f"expected a {size}x{size} matrix")
        for a in range(size):
            for b in range(size):
                p = self.entries[a][b]
                if p.ctx != self.ctx:
                    raise ContextMismatch("entry context")
                require_order_zero(p)
                if p and p.parity() != (self.coord_parity(a) + self.coord_parity(b) + self.parity) % 2:
                    raise NotHomogeneous(f"entry ({a},{b}) has the wrong parity")
        for a in range(size):
            for b in range(size):
                sign = -1 if (self.coord_parity(a) * self.coord_parity(b) + self.parity) % 2 else 1
                if self.entries[b][a] + self.entries[a][b].scale(sign):
                    raise ValueError(f"symmetry fails at ({a},{b})")

    @classmethod
    def from_rows(cls, ctx: JetContext, parity: int, rows) -> "PoissonTensor":
        return cls(ctx, parity, tuple(tuple(r if isinstance(r, DiffPoly) else ctx.const(r) for r in row) for row in rows))

    @property
    def size(self) -> int:
        return self.ctx.even_count + self.ctx.odd_count

    def coordinate(self, a: int) -> JetVariable:
        m = self.ctx.even_count
        return JetVariable(False, a + 1) if a < m else JetVariable(True, a - m + 1)

    def coord_parity(self, a: int) -> int:
        return 0 if a < self.ctx.even_count else 1

    def is_constant(self) -> bool:
        return all(p.is_constant() for row in self.entries for p in row)

    def nonzero(self) -> Iterator[Tuple[int, int, DiffPoly]]:
        for a, row in enumerate(self.entries):
            for b, p in enumerate(row):
                if p:
                    yield a, b, p


def omega_tensor(ctx: JetContext) -> PoissonTensor:
    """The odd Poisson tensor ``d/dth_a (x) d/dt^a + d/dt^a (x) d/dth_a`` of Omega X."""
    if not ctx.is_omega:
        raise ValueError("Omega X needs as many odd as even coordinates")
    m = ctx.even_count
    size = 2 * m
    rows = [[ctx.zero() for _ in range(size)] for _ in range(size)]
    for a in range(m):
        rows[m + a][a] = ctx.one()
        rows[a][m + a] = ctx.one()
    return PoissonTensor(ctx, 1, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: truthy iff ``ok``; ``witness`` explains a failure."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def poisson_bracket_finite(P: PoissonTensor, u: DiffPoly, v: DiffPoly) -> DiffPoly:
    check_same_context(u, v)
    if u.ctx != P.ctx:
        raise ContextMismatch("tensor context")
    require_order_zero(u, v)
    pu = u.parity()
    du = [partial(u, P.coordinate(a)) for a in range(P.size)]
    dv = [partial(v, P.coordinate(b)) for b in range(P.size)]
    out = u.ctx.zero()
    for a, b, p in P.nonzero():
        if not du[a] or not dv[b]:
            continue
        term = p * du[a] * dv[b]
        out = out + (term if (P.coord_parity(b) + P.parity) * pu % 2 else -term)
    return out


def check_poisson(P: PoissonTensor) -> Verdict:
    """Cyclic-sum test of the Poisson condition over every index triple."""
    size = P.size
    nu = P.parity
    dP = {}
    for c in range(size):
        for d in range(size):
            if P.entries[c][d]:
                dP[c, d] = [partial(P.entries[c][d], P.coordinate(a)) for a in range(size)]
    par = P.coord_parity

    def piece(b, c, d):
        if (c, d) not in dP:
            return P.ctx.zero()
        out = P.ctx.zero()
        for a in range(size):
            pba = P.entries[b][a]
            if pba and dP[c, d][a]:
                term = pba * dP[c, d][a]
                out = out + (-term if par(b) * (par(a) + par(c) + nu) % 2 else term)
        return out

    for b, c, d in iproduct(range(size), repeat=3):
        res = piece(b, c, d) + piece(c, d, b) + piece(d, b, c)
        if res:
            return Verdict(False, {"indices": (b, c, d), "residual": res})
    return Verdict(True)


def schouten_finite(u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """Schouten bracket of jet-order-zero multivectors in the shifted grading.

    ``[u, v] = (-1)^|u| d^a u * d_a v - d_a u * d^a v`` with ``d^a`` the left
    derivative by ``th[a,0]`` and ``|u|`` the Schouten degree of ``u``.
    """
    ctx = check_same_context(u, v)
    if not ctx.is_omega:
        raise ValueError("the Schouten bracket needs an Omega X context")
    require_order_zero(u, v)
    sign = -1 if schouten_degree(u) % 2 else 1
    out = ctx.zero()
    for a in range(1, ctx.even_count + 1):
        e = var_id(a, 0)
        du_odd = partial_id(u, True, e)
        dv_even = partial_id(v, False, e)
        if du_odd and dv_even:
            out = out + (du_odd * dv_even).scale(sign)
        du_even = partial_id(u, False, e)
        dv_odd = partial_id(v, True, e)
        if du_even and dv_odd:
            out = out - du_even * dv_odd
    return out


def bivector_tensor(Q: DiffPoly) -> PoissonTensor:
    """The even Poisson tensor ``Q^{ab} = d^b d^a Q`` on the base of a bivector."""
    ctx = Q.ctx
    if not ctx.is_omega or Q.theta_degree() != 2:
        raise ValueError("expected a bivector on Omega X")
    require_order_zero(Q)
    base = JetContext(ctx.even_count, 0)
    m = ctx.even_count
    rows = []
    for a in range(1, m + 1):
        row = []
        for b in range(1, m + 1):
            entry = partial_id(partial_id(Q, True, var_id(a, 0)), True, var_id(b, 0))
            row.append(DiffPoly._raw(base, dict(entry.terms)))
        rows.append(tuple(row))
    return PoissonTensor(base, 0, tuple(rows))
