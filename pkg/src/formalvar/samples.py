"""Seeded random generators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List

from .algebra import DiffPoly, JetContext, PoissonTensor, make_monomial, var_id


def random_coeff(rng: random.Random, span: int = 3) -> Fraction:
    while True:
        num = rng.randint(-span, span)
        if num:
            return Fraction(num, rng.choice((1, 1, 1, 2, 3)))


def random_poly(
    rng: random.Random,
    ctx: JetContext,
    theta_degree: int = 0,
    max_order: int = 2,
    terms: int = 3,
    even_degree: int = 2,
    constant: bool = True,
) -> DiffPoly:
    """Homogeneous in theta degree; nonzero unless theta_degree exceeds what fits."""
    odd_pool = [(b, k) for b in range(1, ctx.odd_count + 1) for k in range(max_order + 1)]
    if theta_degree > len(odd_pool):
        return ctx.zero()
    out = {}
    for _ in range(terms):
        odds = rng.sample(odd_pool, theta_degree)
        deg = rng.randint(0 if constant or theta_degree else 1, even_degree)
        evens = {}
        for _ in range(deg):
            vid = var_id(rng.randint(1, ctx.even_count), rng.randint(0, max_order))
            evens[vid] = evens.get(vid, 0) + 1
        sign, mono = make_monomial(evens, [var_id(b, k) for b, k in odds])
        if sign:
            out[mono] = out.get(mono, 0) + sign * random_coeff(rng)
    u = DiffPoly._raw(ctx, {m: c for m, c in out.items() if c})
    if not u:
        return random_poly(rng, ctx, theta_degree, max_order, terms, even_degree, constant)
    return u


def random_order_zero(rng: random.Random, ctx: JetContext, theta_degree: int, terms: int = 3, even_degree: int = 2) -> DiffPoly:
    return random_poly(rng, ctx, theta_degree, 0, terms, even_degree)


def random_symmetric_invertible(rng: random.Random, m: int, span: int = 3) -> List[List[Fraction]]:
    from .linalg import det

    while True:
        eta = [[Fraction(0)] * m for _ in range(m)]
        for a in range(m):
            for b in range(a, m):
                eta[a][b] = eta[b][a] = Fraction(rng.randint(-span, span))
        if det(eta) != 0:
            return eta


def random_constant_tensor(rng: random.Random, ctx: JetContext, parity: int, density: float = 0.6) -> PoissonTensor:
    """A random constant tensor obeying the symmetry law for ``parity``."""
    size = ctx.even_count + ctx.odd_count
    coords = ctx.base_coordinates()
    rows = [[ctx.zero() for _ in range(size)] for _ in range(size)]
    for a in range(size):
        for b in range(a, size):
            pa, pb = coords[a].parity, coords[b].parity
            # constant entries must have parity nu, i.e. even coefficient: only when pa+pb+nu even
            if (pa + pb + parity) % 2:
                continue
            sym = -((-1) ** ((pa * pb + parity) % 2))  # P^ba = sym * P^ab
            if a == b and sym == -1:
                continue
            if rng.random() > density:
                continue
            c = random_coeff(rng)
            rows[a][b] = ctx.const(c)
            rows[b][a] = ctx.const(c * sym)
    return PoissonTensor.from_rows(ctx, parity, rows)
