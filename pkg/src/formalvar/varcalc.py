"""Total derivative, higher Euler operators, pullbacks and exactness.

The total derivative acts on generators by ``x[a,k] -> x[a,k+1]`` for
even and odd variables alike.  Because packed ids order variables by
``(index, order)``, raising one odd factor's order never disturbs the
sorted order of the others, so no Koszul signs appear here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Optional, Tuple

from .algebra import (
    Coeff,
    DiffPoly,
    JetContext,
    JetVariable,
    Monomial,
    Verdict,
    add_into,
    from_terms,
    partial,
    partial_id,
    require_order_zero,
    var_id,
    var_index,
    var_order,
)


class NotExact(ArithmeticError):
    """The input is not a total derivative; ``witness`` says why."""

    def __init__(self, witness: dict):
        super().__init__(f"not a total derivative: {witness}")
        self.witness = witness


# -- generator-substitution derivations -------------------------------------


@lru_cache(maxsize=1 << 18)
def _mono_ddx(m: Monomial) -> Tuple[Tuple[Monomial, int], ...]:
    evens, odds = m
    out: Dict[Monomial, int] = {}
    for i, (v, e) in enumerate(evens):
        up = v + 1
        acc = dict(evens)
        if e == 1:
            del acc[v]
        else:
            acc[v] = e - 1
        acc[up] = acc.get(up, 0) + 1
        key = (tuple(sorted(acc.items())), odds)
        out[key] = out.get(key, 0) + e
    for i, v in enumerate(odds):
        up = v + 1
        if i + 1 < len(odds) and odds[i + 1] == up:
            continue
        key = (evens, odds[:i] + (up,) + odds[i + 1:])
        out[key] = out.get(key, 0) + 1
    return tuple((k, c) for k, c in out.items() if c)


def total_derivative(u: DiffPoly) -> DiffPoly:
    """The derivation ``d/dx`` on jets."""
    acc: Dict[Monomial, Coeff] = {}
    for m, c in u.terms.items():
        for dm, f in _mono_ddx(m):
            s = acc.get(dm, 0) + c * f
            if s:
                acc[dm] = s
            else:
                del acc[dm]
    return DiffPoly._raw(u.ctx, acc)


def total_derivative_n(u: DiffPoly, n: int) -> DiffPoly:
    for _ in range(n):
        if not u:
            break
        u = total_derivative(u)
    return u


@lru_cache(maxsize=1 << 16)
def _mono_rho(m: Monomial) -> Tuple[Tuple[Monomial, int], ...]:
    evens, odds = m
    out: Dict[Monomial, int] = {}
    for v, e in evens:
        k = var_order(v) - 1
        if k < 1:
            continue
        acc = dict(evens)
        if e == 1:
            del acc[v]
        else:
            acc[v] = e - 1
        acc[v - 1] = acc.get(v - 1, 0) + 1
        key = (tuple(sorted(acc.items())), odds)
        out[key] = out.get(key, 0) + e * k * (k + 1)
    for i, v in enumerate(odds):
        k = var_order(v) - 1
        if k < 1:
            continue
        if i > 0 and odds[i - 1] == v - 1:
            continue
        key = (evens, odds[:i] + (v - 1,) + odds[i + 1:])
        out[key] = out.get(key, 0) + k * (k + 1)
    return tuple((k, c) for k, c in out.items() if c)


def sl2_rho(u: DiffPoly) -> DiffPoly:
    """The lowering operator: ``x[a,k+1] -> k(k+1) x[a,k]``."""
    acc: Dict[Monomial, Coeff] = {}
    for m, c in u.terms.items():
        for dm, f in _mono_rho(m):
            add_into(acc, ((dm, c),), f)
    return from_terms(u.ctx, acc)


def _mono_weight(m: Monomial) -> int:
    evens, odds = m
    return sum(var_order(v) * e for v, e in evens) + sum(var_order(v) for v in odds)


def sl2_weight(u: DiffPoly) -> DiffPoly:
    """The Cartan element ``H``: multiplies each monomial by its total jet order."""
    return DiffPoly._raw(u.ctx, {m: c * w for m, c in u.terms.items() if (w := _mono_weight(m))})


# -- higher Euler operators --------------------------------------------------


def euler(u: DiffPoly, x_base: Tuple[str, int], k: int) -> DiffPoly:
    """Higher Euler operator ``sum_i (-1)^i C(k+i,k) d^i d/dx[a,k+i]``.

    ``x_base`` is ``("even", a)`` or ``("odd", a)``; odd variables use
    left derivatives.
    """
    kind, a = x_base
    odd = _odd_kind(kind)
    top = u.max_order()
    if k > top:
        return u.ctx.zero()
    # Horner in the total derivative
    acc = u.ctx.zero()
    for i in range(top - k, -1, -1):
        if acc:
            acc = total_derivative(acc)
        piece = partial_id(u, odd, var_id(a, k + i))
        if piece:
            c = comb(k + i, k)
            acc = acc + (piece.scale(-c if i & 1 else c))
    return acc


def _odd_kind(kind) -> bool:
    if isinstance(kind, bool):
        return kind
    if kind in ("odd", "th", 1):
        return True
    if kind in ("even", "t", 0):
        return False
    raise ValueError(f"unknown variable kind {kind!r}")


def variational_derivatives(u: DiffPoly) -> Dict[Tuple[str, int], DiffPoly]:
    """All nonzero ``euler(u, x, 0)`` keyed by ``(kind, index)``."""
    ctx = u.ctx
    out = {}
    for kind, count in (("even", ctx.even_count), ("odd", ctx.odd_count)):
        for a in range(1, count + 1):
            e = euler(u, (kind, a), 0)
            if e:
                out[kind, a] = e
    return out


def exactness_witness(u: DiffPoly) -> Optional[dict]:
    c = u.constant_term()
    if c:
        return {"constant": c}
    for (kind, a), e in variational_derivatives(u).items():
        return {"kind": kind, "index": a, "euler_0": e}
    return None


def is_exact(u: DiffPoly) -> bool:
    """True iff ``u`` is a total derivative."""
    return exactness_witness(u) is None


def exact_verdict(u: DiffPoly) -> Verdict:
    w = exactness_witness(u)
    return Verdict(w is None, w)


# -- inverting the total derivative ------------------------------------------


def _integrate_even(c: DiffPoly, vid: int) -> DiffPoly:
    out = {}
    for (evens, odds), coef in c.terms.items():
        acc = dict(evens)
        e = acc.get(vid, 0) + 1
        acc[vid] = e
        out[(tuple(sorted(acc.items())), odds)] = Fraction(coef) / e
    return from_terms(c.ctx, out)


def invert_total_derivative(u: DiffPoly) -> DiffPoly:
    """Primitive ``v`` with ``total_derivative(v) == u`` and no constant term.

    Works down from the highest jet order: each top-order variable occurs
    linearly in a total derivative, and its coefficient is integrated
    against the same variable one order lower.
    """
    witness = exactness_witness(u)
    if witness is not None:
        raise NotExact(witness)
    ctx = u.ctx
    primitive = ctx.zero()
    rest = u
    while rest:
        top = rest.max_order()
        if top <= 0:
            raise NotExact({"residual": rest})
        tops = sorted(
            (x for x in rest.variables() if x.order == top),
            key=lambda x: (x.odd, x.index),
            reverse=True,
        )
        for x in tops:
            c = partial(rest, x)
            if not c:
                continue
            lower = x.shifted(-1)
            if x.odd:
                if partial(c, lower):
                    raise NotExact({"residual": rest})
                w = ctx.var(lower) * c
            else:
                w = _integrate_even(c, lower.vid)
            primitive = primitive + w
            rest = rest - total_derivative(w)
        if rest and rest.max_order() >= top:
            raise NotExact({"residual": rest})
    return primitive


# -- pullback along polynomial coordinate maps --------------------------------


@dataclass(frozen=True)
class CoordinateMap:
    """A jet-order-zero polynomial map, given by the image of each base coordinate.

    ``targets`` lists images of ``t[1..m]`` then ``th[1..n]``.
    """

    ctx: JetContext
    targets: Tuple[DiffPoly, ...]
    jacobian: Tuple[Tuple[DiffPoly, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coords = self.ctx.base_coordinates()
        if len(self.targets) != len(coords):
            raise ValueError(f"need {len(coords)} targets")
        for x, f in zip(coords, self.targets):
            if f.ctx != self.ctx:
                raise ValueError("target context mismatch")
            require_order_zero(f)
            if f and f.parity() != x.parity:
                raise ValueError(f"parity mismatch for the image of {x}")
        jac = tuple(tuple(partial(f, a) for f in self.targets) for a in coords)
        object.__setattr__(self, "jacobian", jac)

    @classmethod
    def identity(cls, ctx: JetContext) -> "CoordinateMap":
        return cls(ctx, tuple(ctx.var(x) for x in ctx.base_coordinates()))

    def image(self, x: JetVariable) -> DiffPoly:
        coords = self.ctx.base_coordinates()
        pos = coords.index(JetVariable(x.odd, x.index, 0))
        return total_derivative_n(self.targets[pos], x.order)

    def compose(self, outer: "CoordinateMap") -> "CoordinateMap":
        """The map whose pullback is ``pullback(self, pullback(outer, -))``."""
        return CoordinateMap(self.ctx, tuple(pullback(self, g) for g in outer.targets))


def pullback(f: CoordinateMap, u: DiffPoly) -> DiffPoly:
    """The algebra map with ``x[a,k] -> d^k f(x[a])``; it commutes with ``d``."""
    if u.ctx != f.ctx:
        raise ValueError("pullback context mismatch")
    cache: Dict[Tuple[bool, int], DiffPoly] = {}

    def img(odd: bool, vid: int) -> DiffPoly:
        key = (odd, vid)
        if key not in cache:
            cache[key] = f.image(JetVariable(odd, var_index(vid), var_order(vid)))
        return cache[key]

    out = u.ctx.zero()
    for (evens, odds), c in u.terms.items():
        term = u.ctx.const(c)
        for v, e in evens:
            term = term * (img(False, v) ** e)
        for v in odds:
            term = term * img(True, v)
        out = out + term
    return out
