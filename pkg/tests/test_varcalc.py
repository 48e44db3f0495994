import pytest
from hypothesis import given

from formalvar import JetContext, parse
from formalvar.samples import random_poly
from formalvar.varcalc import (
    CoordinateMap,
    NotExact,
    euler,
    exact_verdict,
    invert_total_derivative,
    is_exact,
    pullback,
    sl2_rho,
    sl2_weight,
    total_derivative,
)

from conftest import poly, rngs, some_context

D = total_derivative


class TestTotalDerivative:
    def test_examples(self):
        assert D(parse("t1_0")) == parse("t1_1")
        assert D(parse("t1_0*th1_0")) == parse("t1_1*th1_0 + t1_0*th1_1")
        assert not D(parse("7"))

    @given(rngs)
    def test_raises_weight_by_one(self, rng):
        ctx = some_context(rng)
        u = random_poly(rng, ctx, 0, 2, 1, 2, constant=False)
        (mono,) = u.terms
        weight = sum(v.order for v in u.variables() for _ in range(dict(mono[0]).get(v.vid, 1)))
        assert sl2_weight(u) == u.scale(weight)
        assert sl2_weight(D(u)) == D(u).scale(weight + 1)


class TestEuler:
    def test_examples(self):
        assert euler(parse("1/2*t1_1^2"), ("even", 1), 0) == parse("-t1_2")
        assert euler(parse("t1_1"), ("even", 1), 1) == parse("1")
        assert euler(parse("th1_0*th1_1"), ("odd", 1), 0) == parse("2*th1_1")

    @given(rngs)
    def test_total_derivatives_are_killed(self, rng):
        ctx = some_context(rng)
        u = poly(rng, ctx, order=3)
        for x in ctx.base_coordinates():
            kind = "odd" if x.odd else "even"
            assert not euler(D(u), (kind, x.index), 0)
            for k in range(1, 5):
                assert euler(D(u), (kind, x.index), k) == euler(u, (kind, x.index), k - 1)


class TestExactness:
    def test_examples(self):
        assert is_exact(D(parse("t1_0^3*th1_0*th1_2")))
        assert not is_exact(parse("t1_0"))
        verdict = exact_verdict(parse("1"))
        assert not verdict and verdict.witness == {"constant": 1}

    def test_inversion_examples(self):
        assert invert_total_derivative(parse("t1_1")) == parse("t1_0")
        assert invert_total_derivative(parse("t1_0*t1_1")) == parse("1/2*t1_0^2")
        with pytest.raises(NotExact) as err:
            invert_total_derivative(parse("t1_0"))
        assert err.value.witness["euler_0"] == parse("1")

    @given(rngs)
    def test_round_trip(self, rng):
        ctx = some_context(rng)
        u = poly(rng, ctx, order=3)
        v = invert_total_derivative(D(u))
        assert D(v) == D(u)
        assert v.constant_term() == 0

    @given(rngs)
    def test_non_exact_detected(self, rng):
        ctx = some_context(rng)
        u = poly(rng, ctx, order=2)
        if is_exact(u):
            assert D(invert_total_derivative(u)) == u
        else:
            with pytest.raises(NotExact):
                invert_total_derivative(u)


class TestSl2:
    def test_examples(self):
        assert not sl2_rho(parse("t1_1"))
        assert sl2_rho(parse("t1_2")) == parse("2*t1_1")
        assert sl2_weight(parse("t1_2")) == parse("2*t1_2")

    @given(rngs)
    def test_relations(self, rng):
        ctx = some_context(rng)
        u = poly(rng, ctx, order=3)
        H, R = sl2_weight, sl2_rho
        assert H(D(u)) - D(H(u)) == D(u)
        assert H(R(u)) - R(H(u)) == -R(u)
        assert D(R(u)) - R(D(u)) == H(u).scale(-2)

    @given(rngs)
    def test_weight_kernel_is_order_zero(self, rng):
        ctx = some_context(rng)
        u = poly(rng, ctx, order=0)
        assert not sl2_weight(u)


def _random_map(rng, ctx):
    targets = []
    for x in ctx.base_coordinates():
        extra = random_poly(rng, ctx, 1 if x.odd else 0, 0, 2, 1 if x.odd else 2, constant=x.odd)
        targets.append(ctx.var(x) + extra if rng.random() < 0.8 else ctx.var(x))
    return CoordinateMap(ctx, tuple(targets))


class TestPullback:
    def test_square_map(self):
        ctx = JetContext(1, 0)
        f = CoordinateMap(ctx, (ctx.t(1) * ctx.t(1),))
        assert pullback(f, ctx.t(1, 1)) == (ctx.t(1) * ctx.t(1, 1)).scale(2)

    def test_identity(self):
        ctx = JetContext(2, 1)
        u = parse("t1_2*th1_1 + t2_0", ctx)
        assert pullback(CoordinateMap.identity(ctx), u) == u

    def test_parity_mismatch(self):
        ctx = JetContext(1, 1)
        with pytest.raises(ValueError):
            CoordinateMap(ctx, (ctx.th(1), ctx.t(1)))
        with pytest.raises(ValueError):
            CoordinateMap(ctx, (ctx.t(1, 1), ctx.th(1)))

    @given(rngs)
    def test_homomorphism_commuting_with_d(self, rng):
        ctx = some_context(rng)
        f = _random_map(rng, ctx)
        u, v = poly(rng, ctx), poly(rng, ctx)
        assert pullback(f, u * v) == pullback(f, u) * pullback(f, v)
        assert pullback(f, D(u)) == D(pullback(f, u))

    @given(rngs)
    def test_functoriality(self, rng):
        ctx = some_context(rng)
        f, g = _random_map(rng, ctx), _random_map(rng, ctx)
        u = poly(rng, ctx)
        assert pullback(f.compose(g), u) == pullback(f, pullback(g, u))

    @given(rngs)
    def test_chain_rule(self, rng):
        ctx = some_context(rng)
        f = _random_map(rng, ctx)
        u = poly(rng, ctx, order=2)
        coords = ctx.base_coordinates()
        for k in range(u.max_order() + 1):
            for ai, x in enumerate(coords):
                kind = "odd" if x.odd else "even"
                rhs = ctx.zero()
                for bi, y in enumerate(coords):
                    if f.jacobian[ai][bi]:
                        rhs = rhs + f.jacobian[ai][bi] * pullback(f, euler(u, ("odd" if y.odd else "even", y.index), k))
                assert euler(pullback(f, u), (kind, x.index), k) == rhs
