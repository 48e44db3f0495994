import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from formalvar import JetContext, parse
from formalvar.acceptance import _matrix_bch, _metric, _random_mc, _truncated
from formalvar.brackets import LocalFunctional
from formalvar.deligne import (
    DegreeError,
    EuclidCarrier,
    LocalCarrier,
    MatrixCarrier,
    NotComposable,
    SchoutenCarrier,
    TruncatedElement,
    TruncationMismatch,
    TwoMorphism,
    bch,
    bch_A,
    bracket_A,
    compose_horizontal,
    compose_vertical,
    curvature,
    d_A,
    exp_ad,
    gauge_act,
    is_maurer_cartan,
)

from conftest import rngs

F = Fraction


def euclid_setup(rng, N=None, base=True):
    from formalvar.acceptance import _mc_seed

    n = rng.randint(2, 3)
    eta = _metric(rng, n)
    car = EuclidCarrier(eta, _mc_seed(rng, eta) if base and rng.random() < 0.5 else None)
    N = N or rng.randint(1, 3)
    return car, N, _random_mc(rng, car, N)


def matrices(rng, car, N):
    rand = lambda: tuple(tuple(F(rng.randint(-2, 2)) for _ in range(car.size)) for _ in range(car.size))
    return TruncatedElement(car, tuple(rand() for _ in range(N)))


class TestCurvature:
    def test_trivial_examples(self):
        ctx = JetContext.omega(2)
        car = SchoutenCarrier(ctx)
        q = parse("th1_0*th2_0", ctx)
        A = TruncatedElement.single(car, 1, 1, q)
        assert curvature(A).is_zero()
        assert curvature(TruncatedElement.zero(car, 3)).is_zero()

    def test_kdv_as_deformation_of_dispersionless(self):
        ctx = JetContext.omega(1)
        car = LocalCarrier(ctx, LocalFunctional(parse("t1_0*th1_0*th1_1")))
        A = TruncatedElement.single(car, 2, 1, LocalFunctional(parse("1/8*th1_0*th1_3")))
        assert is_maurer_cartan(A)
        off = TruncatedElement.single(car, 2, 1, LocalFunctional(parse("t1_0*th1_0*th1_3")))
        assert not is_maurer_cartan(off)

    def test_degree_errors(self):
        car = SchoutenCarrier(JetContext.omega(2))
        X = TruncatedElement.single(car, 2, 1, parse("t1_0"))
        with pytest.raises(DegreeError):
            curvature(X)
        with pytest.raises(DegreeError):
            gauge_act(X, X)
        mixed = TruncatedElement(car, (parse("t1_0"), parse("th1_0*th2_0")))
        with pytest.raises(DegreeError):
            mixed.degree()

    def test_truncation_mismatch(self):
        car = MatrixCarrier(2)
        with pytest.raises(TruncationMismatch):
            bch(TruncatedElement.zero(car, 2), TruncatedElement.zero(car, 3))
        with pytest.raises(TruncationMismatch):
            TruncatedElement.zero(car, 2) + TruncatedElement.zero(MatrixCarrier(2), 2)
        with pytest.raises(ValueError):
            TruncatedElement(car, ())


class TestBCH:
    def test_low_order_terms(self):
        car = MatrixCarrier(2)
        X = TruncatedElement.single(car, 2, 1, ((F(0), F(1)), (F(0), F(0))))
        Y = TruncatedElement.single(car, 2, 1, ((F(0), F(0)), (F(1), F(0))))
        expected = X + Y + TruncatedElement.single(car, 2, 2, car.scale(car.bracket(X.coeffs[0], Y.coeffs[0]), F(1, 2)))
        assert bch(X, Y) == expected
        assert bch(X, TruncatedElement.zero(car, 2)) == X
        assert bch(X, X.scale(3)) == X.scale(4)
        assert bch(X, -X).is_zero()

    @given(rngs)
    def test_matches_matrix_exponential(self, rng):
        car = MatrixCarrier(rng.randint(1, 3))
        N = rng.randint(1, 4)
        X, Y = matrices(rng, car, N), matrices(rng, car, N)
        assert bch(X, Y).coeffs == _matrix_bch(car.size, N, X.coeffs, Y.coeffs)

    @settings(max_examples=25)
    @given(rngs)
    def test_associative(self, rng):
        car = MatrixCarrier(2)
        N = rng.randint(1, 4)
        X, Y, Z = (matrices(rng, car, N) for _ in range(3))
        assert bch(bch(X, Y), Z) == bch(X, bch(Y, Z))


class TestGauge:
    def test_abelian_carrier(self):
        class Abelian(SchoutenCarrier):
            def bracket(self, x, y):
                return self.ctx.zero()

        ctx = JetContext.omega(2)
        car = Abelian(ctx, parse("t1_0*th1_0*th2_0", ctx))
        X = TruncatedElement(car, (parse("th1_0*t2_0", ctx), parse("th2_0*t1_0^2", ctx)))
        A = TruncatedElement(car, (parse("th1_0*th2_0", ctx), parse("t2_0*th1_0*th2_0", ctx)))
        assert gauge_act(X, A) == A - TruncatedElement(car, tuple(car.d(c) for c in X.coeffs))
        assert not gauge_act(X, A) == A

    def test_commuting_carrier_is_affine(self):
        car = MatrixCarrier(1)
        X = TruncatedElement(car, (((F(2),),), ((F(-1),),)))
        assert bch(X, X) == X.scale(2)

    @settings(max_examples=20)
    @given(rngs)
    def test_fixed_points_and_action(self, rng):
        car, N, A = euclid_setup(rng)
        assert is_maurer_cartan(A)
        X, Y = _truncated(rng, car, N, 0), _truncated(rng, car, N, 0)
        u = _truncated(rng, car, N, -1)
        assert gauge_act(d_A(A, u), A) == A
        if not d_A(A, X).is_zero():
            assert not gauge_act(X, A) == A
        assert gauge_act(bch(Y, X), A) == gauge_act(Y, gauge_act(X, A))
        assert is_maurer_cartan(gauge_act(X, A))

    @settings(max_examples=20)
    @given(rngs)
    def test_covariance(self, rng):
        car, N, _ = euclid_setup(rng)
        A = _truncated(rng, car, N, 1)
        X, w = _truncated(rng, car, N, 0), _truncated(rng, car, N, rng.randint(-1, 1))
        B = gauge_act(X, A)
        assert curvature(B) == exp_ad(X, curvature(A))
        assert d_A(B, w) == exp_ad(X, d_A(A, exp_ad(X.scale(-1), w)))


class TestBracketA:
    def test_zero_carrier(self):
        ctx = JetContext.omega(2)
        car = SchoutenCarrier(ctx)
        A = TruncatedElement.zero(car, 2)
        u = TruncatedElement.single(car, 2, 1, parse("t1_0", ctx))
        v = TruncatedElement.single(car, 2, 1, parse("t2_0^2", ctx))
        assert bracket_A(A, u, v).is_zero()
        with pytest.raises(DegreeError):
            bracket_A(A, u, TruncatedElement.single(car, 2, 1, parse("th1_0", ctx)))

    @settings(max_examples=20)
    @given(rngs)
    def test_lie_algebra_for_mc(self, rng):
        car, N, A = euclid_setup(rng)
        u, v, w = (_truncated(rng, car, N, -1) for _ in range(3))
        br = lambda a, b: bracket_A(A, a, b)
        assert (br(u, v) + br(v, u)).is_zero()
        assert (br(u, br(v, w)) - br(v, br(u, w)) - br(br(u, v), w)).is_zero()

    @settings(max_examples=20)
    @given(rngs)
    def test_closed_elements_are_central(self, rng):
        car, N, A = euclid_setup(rng)
        u, v = _truncated(rng, car, N, -1), _truncated(rng, car, N, -1)
        for z in (d_A(A, _truncated(rng, car, N, -2)), u):
            if d_A(A, z).is_zero():
                assert bracket_A(A, z, v).is_zero()
                assert bracket_A(A, v, z).is_zero()


class TestTwoMorphisms:
    def test_identities(self):
        rng = random.Random(3)
        car, N, A = euclid_setup(rng, 2)
        X, Y = _truncated(rng, car, N, 0), _truncated(rng, car, N, 0)
        idX = TwoMorphism.identity(X, A)
        assert idX.target == X
        assert compose_vertical(idX, idX) == idX
        idY = TwoMorphism.identity(Y, gauge_act(X, A))
        assert compose_horizontal(idY, idX) == TwoMorphism.identity(bch(Y, X), A)

    @settings(max_examples=20)
    @given(rngs)
    def test_vertical_is_group_law(self, rng):
        car, N, A = euclid_setup(rng)
        X = _truncated(rng, car, N, 0)
        u, v = _truncated(rng, car, N, -1), _truncated(rng, car, N, -1)
        first = TwoMorphism(u, X, A)
        second = TwoMorphism(v, first.target, A)
        both = compose_vertical(second, first)
        assert both.u == bch_A(A, u, v)
        assert both.target == second.target

    def test_not_composable(self):
        rng = random.Random(5)
        car, N, A = euclid_setup(rng, 2, base=False)
        X = _truncated(rng, car, N, 0)
        u = _truncated(rng, car, N, -1)
        while d_A(A, X).is_zero() or d_A(A, u).is_zero():
            X, u = _truncated(rng, car, N, 0), _truncated(rng, car, N, -1)
        first = TwoMorphism(u, X, A)
        with pytest.raises(NotComposable):
            compose_vertical(TwoMorphism.identity(X, A), first)
        with pytest.raises(NotComposable):
            compose_horizontal(TwoMorphism.identity(X, A), first)

    @settings(max_examples=15)
    @given(rngs)
    def test_interchange_and_associativity(self, rng):
        car, N, A = euclid_setup(rng)
        X, Y, Z = (_truncated(rng, car, N, 0) for _ in range(3))
        m = lambda: _truncated(rng, car, N, -1)
        B = gauge_act(X, A)
        C = gauge_act(Y, B)
        first = TwoMorphism(m(), X, A)
        second = TwoMorphism(m(), first.target, A)
        third = TwoMorphism(m(), Y, B)
        fourth = TwoMorphism(m(), third.target, B)
        lhs = compose_vertical(compose_horizontal(fourth, second), compose_horizontal(third, first))
        rhs = compose_horizontal(compose_vertical(fourth, third), compose_vertical(second, first))
        assert lhs == rhs
        fifth = TwoMorphism(m(), Z, C)
        left = compose_horizontal(compose_horizontal(fifth, third), first)
        right = compose_horizontal(fifth, compose_horizontal(third, first))
        assert left == right
