from fractions import Fraction

import pytest
from hypothesis import given

from formalvar import JetContext, parse
from formalvar.brackets import ConeElement, LocalFunctional, schouten_local
from formalvar.hamiltonian import (
    DiffOperatorMatrix,
    DNSpec,
    LiftError,
    Metric,
    NotHamiltonian,
    check_lift,
    check_skew_adjoint,
    compute_lift,
    d_eta_functional,
    delta_Q,
    dn_check,
    hydrodynamic_density,
    hydrodynamic_lift,
    hydrodynamic_matrix,
    hydrodynamic_operator,
    is_hamiltonian,
    kdv_bivector,
    kdv_density,
    kdv_lift_family,
    kdv_operator,
    operator_to_bivector,
)
from formalvar.samples import random_poly, random_symmetric_invertible

from conftest import rngs

F = Fraction


def so3(scale=1, B=None):
    A = {}
    for (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        A[a, b, c], A[b, a, c] = F(scale), F(-scale)
    return DNSpec(Metric.identity(3), A, B or [[0] * 3 for _ in range(3)])


class TestOperators:
    def test_skew_adjointness(self):
        assert check_skew_adjoint(kdv_operator())
        ctx = JetContext.omega(1)
        sym = DiffOperatorMatrix(ctx, {(1, 1, 0): ctx.const(1)})
        v = check_skew_adjoint(sym)
        assert not v and v.witness["residual"]
        eta = Metric([[0, 1], [1, 0]])
        assert check_skew_adjoint(hydrodynamic_matrix(eta))
        lone = DiffOperatorMatrix(ctx, {(1, 1, 1): ctx.t(1)})
        assert not check_skew_adjoint(lone)

    def test_bivector(self):
        assert operator_to_bivector(kdv_operator()) == kdv_bivector()
        assert kdv_density() == parse("1/8*th1_0*th1_3 + t1_0*th1_0*th1_1")
        ctx = JetContext.omega(2)
        assert operator_to_bivector(DiffOperatorMatrix(ctx, {})).is_zero()
        with pytest.raises(ValueError):
            operator_to_bivector(DiffOperatorMatrix(ctx, {(1, 2, 0): ctx.const(1)}))
        with pytest.raises(ValueError):
            DiffOperatorMatrix(ctx, {(3, 1, 0): ctx.const(1)})
        eta = Metric([[2, 1], [1, 0]])
        # the verbatim density of eta*d is eta th th_1, twice the hydrodynamic normalization
        assert operator_to_bivector(hydrodynamic_matrix(eta)) == hydrodynamic_operator(eta).scale(2)
        assert not LocalFunctional(ctx.th(1) * ctx.th(1, 1)).is_zero()

    def test_is_hamiltonian_examples(self):
        assert is_hamiltonian(kdv_bivector())
        assert is_hamiltonian(parse("th1_0*th2_0"))
        assert is_hamiltonian(parse("t1_0*th1_0*th1_1"))
        with pytest.raises(ValueError):
            is_hamiltonian(parse("t1_0*th1_0"))

    def test_non_hamiltonian_has_witness(self):
        v = is_hamiltonian(parse("t1_0^2*th1_0*th2_1 + t2_0*th2_0*th2_1"))
        assert not v
        assert v.witness is not None

    def test_delta_q(self):
        with pytest.raises(NotHamiltonian):
            delta_Q(LocalFunctional(parse("t1_0^2*th1_0*th2_1 + t2_0*th2_0*th2_1")), parse("t1_0"))

    @given(rngs)
    def test_delta_q_squares_to_zero_and_is_a_derivation(self, rng):
        Q = kdv_bivector()
        ctx = Q.rep.ctx
        u = random_poly(rng, ctx, rng.randint(0, 2), 2, 3)
        v = random_poly(rng, ctx, rng.randint(0, 2), 2, 3)
        assert delta_Q(Q, delta_Q(Q, u)).is_zero()
        lhs = delta_Q(Q, schouten_local(u, v))
        p = u.theta_degree() - 1 if u else 0
        rhs = schouten_local(delta_Q(Q, u), v) + schouten_local(u, delta_Q(Q, v)).scale(-1 if p % 2 else 1)
        assert lhs == rhs


class TestHydrodynamic:
    @given(rngs)
    def test_d_eta_is_bracket_with_hydrodynamic(self, rng):
        m = rng.randint(1, 2)
        eta = Metric(random_symmetric_invertible(rng, m, span=2))
        H = hydrodynamic_operator(eta)
        assert is_hamiltonian(H)
        u = random_poly(rng, eta.context(), rng.randint(0, 2), 2, 3)
        assert d_eta_functional(eta, u) == schouten_local(H, u)

    def test_scaling(self):
        eta = Metric([[1, 0], [0, -1]])
        twice = Metric([[2, 0], [0, -2]])
        assert hydrodynamic_density(twice) == hydrodynamic_density(eta).scale(2)

    def test_hydrodynamic_lift_has_no_tilde(self):
        eta = Metric([[0, 1], [1, 0]])
        L = compute_lift(hydrodynamic_density(eta))
        assert not L.tilde
        assert check_lift(hydrodynamic_operator(eta), L)
        assert L == hydrodynamic_lift(eta)


class TestLifts:
    def test_kdv_lift(self):
        L = compute_lift(kdv_density())
        assert L.tilde == parse("-1/8*th1_0*th1_1*th1_2")
        assert L == kdv_lift_family(0)
        assert check_lift(kdv_bivector(), L)

    @pytest.mark.parametrize("a", [0, 1, F(-3, 7), 5])
    def test_kdv_family(self, a):
        assert check_lift(kdv_bivector(), kdv_lift_family(a))

    def test_wrong_tilde_fails_with_residual(self):
        v = check_lift(kdv_bivector(), kdv_lift_family(0, F(1, 8)))
        assert not v
        assert v.witness["condition"] == "maurer_cartan"
        assert v.witness["body"] == parse("1/4*th1_0*th1_1*th1_3")

    def test_wrong_body_fails(self):
        ctx = JetContext.omega(1)
        v = check_lift(kdv_bivector(), ConeElement.of(ctx.th(1) * ctx.th(1, 1)))
        assert not v and v.witness["condition"] == "integral"

    def test_ultralocal_lift(self):
        q = parse("th1_0*th2_0")
        L = compute_lift(q)
        assert check_lift(q, L)

    def test_non_hamiltonian_has_no_lift(self):
        with pytest.raises(LiftError):
            compute_lift(parse("t1_0^2*th1_0*th2_1 + t2_0*th2_0*th2_1"))


class TestDubrovinNovikov:
    def test_so3(self):
        rep = dn_check(so3())
        assert rep.jacobi and rep.killing and rep.cocycle and rep.direct
        assert rep.ok and rep.consistent

    def test_affine_plane(self):
        rep = dn_check(DNSpec(Metric.identity(2), {(1, 2, 1): 1, (2, 1, 1): -1}, [[0, 0], [0, 0]]))
        assert rep.jacobi
        assert not rep.killing
        assert not rep.direct
        assert rep.consistent and not rep.ok

    def test_zero_structure(self):
        rep = dn_check(DNSpec(Metric([[0, 1], [1, 0]]), {}, [[0, 1], [-1, 0]]))
        assert rep.direct and rep.consistent

    def test_validation(self):
        with pytest.raises(ValueError):
            DNSpec(Metric.identity(2), {(1, 2, 1): 1}, [[0, 0], [0, 0]])
        with pytest.raises(ValueError):
            DNSpec(Metric.identity(2), {}, [[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            Metric([[1, 1], [1, 1]])
        with pytest.raises(ValueError):
            Metric([[1, 2], [0, 1]])

    def test_so3_with_coboundary(self):
        spec = so3(2)
        v = [1, -1, 0]
        B = [[sum(spec.a(a, b, c) * v[c - 1] for c in (1, 2, 3)) for b in (1, 2, 3)] for a in (1, 2, 3)]
        rep = dn_check(DNSpec(spec.eta, spec.A, B))
        assert rep.cocycle and rep.direct
