from fractions import Fraction

import pytest
from hypothesis import given

from formalvar.acceptance import _cone_element, _euclid_element, _metric
from formalvar.brackets import ConeElement, cone_bracket, integrate, schouten_local
from formalvar.hamiltonian import (
    DiffOperatorMatrix,
    DNSpec,
    Metric,
    d_eta_functional,
    dn_check,
    hydrodynamic_operator,
    is_hamiltonian,
    operator_to_bivector,
)
from formalvar.euclid import (
    EuclidElement,
    T_map,
    d0_op,
    d_op,
    g_bracket,
    h_bracket,
    mc_to_lie,
    metric_euler,
    module_action,
    sigma,
    tau,
    tau0,
    translation_act,
    twisted_cone_diff,
    untwisted_cone_diff,
    vector_pairing,
)
from formalvar.samples import random_poly
from formalvar.varcalc import total_derivative

from conftest import rngs

F = Fraction
I3 = Metric.identity(3)
C3 = I3.context()
th = C3.th


def sign(e):
    return -1 if e % 2 else 1


class TestHBracket:
    def test_examples(self):
        assert h_bracket(I3, th(1) * th(2), th(2) * th(3)) == th(1) * th(3)
        assert not h_bracket(I3, th(1) * th(2), th(1) * th(2))
        assert h_bracket(I3, th(1) * th(2) * th(3), th(1)) == th(2) * th(3)

    def test_metric_enters_inverted(self):
        eta = Metric([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert h_bracket(eta, th(1) * th(2), th(1) * th(3)) == (th(2) * th(3)).scale(F(-1, 2))

    def test_rejects_jet_variables(self):
        with pytest.raises(ValueError):
            EuclidElement(C3.th(1, 1), C3.zero(), I3)


class TestGBracket:
    def test_abelian_ideal_and_semidirect(self):
        a, b = EuclidElement.make(I3, alpha_tilde=th(1) * th(2)), EuclidElement.make(I3, alpha_tilde=th(3))
        assert g_bracket(a, b).is_zero()
        h = EuclidElement.make(I3, alpha=th(1) * th(2) * th(3))
        got = g_bracket(h, b)
        assert got.alpha == C3.zero()
        assert got.alpha_tilde == module_action(I3, h.alpha, b.alpha_tilde)
        assert got.alpha_tilde == -(th(1) * th(2))

    @given(rngs)
    def test_graded_lie(self, rng):
        eta = _metric(rng, rng.randint(1, 4))
        x, y, z = (_euclid_element(rng, eta, rng.randint(-1, 2)) for _ in range(3))
        if None in (x.degree(), y.degree()):
            return
        p, q = x.degree(), y.degree()
        assert (g_bracket(x, y) + g_bracket(y, x).scale(sign(p * q))).is_zero()
        jac = g_bracket(x, g_bracket(y, z)) - g_bracket(g_bracket(x, y), z) - g_bracket(y, g_bracket(x, z)).scale(sign(p * q))
        assert jac.is_zero()


class TestLieDictionary:
    def test_so3(self):
        rep = mc_to_lie(EuclidElement.make(I3, alpha=th(1) * th(2) * th(3)))
        assert rep.maurer_cartan and rep.jacobi and rep.cocycle_ok and rep.consistent
        s = rep.structure
        assert s[0][1][2] != 0 and s[0][1][2] == s[1][2][0] == s[2][0][1]
        assert s[0][1][0] == s[0][1][1] == 0
        assert all(s[a][a] == (0, 0, 0) for a in range(3))

    def test_abelian(self):
        alpha_tilde = th(1) * th(2) - (th(2) * th(3)).scale(3)
        rep = mc_to_lie(EuclidElement.make(I3, alpha_tilde=alpha_tilde))
        assert rep.maurer_cartan and rep.consistent
        assert all(c == 0 for row in rep.structure for col in row for c in col)
        assert rep.cocycle[0][1] == -rep.cocycle[1][0] != 0

    def test_four_dimensional(self):
        eta = Metric.identity(4)
        t = eta.context().th
        alpha = t(1) * t(2) * t(3)
        good = mc_to_lie(EuclidElement.make(eta, alpha_tilde=t(1) * t(2), alpha=alpha))
        assert good.maurer_cartan and good.jacobi and good.cocycle_ok
        bad = mc_to_lie(EuclidElement.make(eta, alpha_tilde=t(1) * t(4), alpha=alpha))
        assert not bad.maurer_cartan and bad.jacobi and not bad.cocycle_ok
        assert bad.cocycle_ok.witness["indices"] == [2, 3, 4]
        assert bad.maurer_cartan.witness["tilde"]
        assert bad.consistent

    def test_degree_mismatch(self):
        with pytest.raises(ValueError):
            mc_to_lie(EuclidElement.make(I3, alpha_tilde=th(1)))


class TestTranslation:
    so3 = EuclidElement.make(I3, alpha_tilde=th(1) * th(3), alpha=th(1) * th(2) * th(3))

    def test_trivial_cases(self):
        assert translation_act((0, 0, 0), self.so3) == self.so3
        ab = EuclidElement.make(I3, alpha_tilde=th(1) * th(2))
        assert translation_act((1, -2, 5), ab) == ab

    @pytest.mark.parametrize("v", [(1, 0, 0), (1, -1, 2), (0, 3, -1)])
    def test_shifts_cocycle_by_coboundary(self, v):
        before, moved = mc_to_lie(self.so3), translation_act(v, self.so3)
        after = mc_to_lie(moved)
        assert moved.alpha == self.so3.alpha
        assert after.maurer_cartan
        for a in range(3):
            for b in range(3):
                bracket = sum((c * th(k + 1) for k, c in enumerate(before.structure[a][b]) if c), C3.zero())
                assert after.cocycle[a][b] - before.cocycle[a][b] == vector_pairing(I3, v, bracket)


class TestConeMaps:
    def test_sigma_of_so3(self):
        x = EuclidElement.make(I3, alpha=th(1) * th(2) * th(3))
        s = sigma(x)
        t = C3.t
        assert s.rep == t(1) * th(2) * th(3) - t(2) * th(1) * th(3) + t(3) * th(1) * th(2)
        half = F(1, 2)
        linear = DiffOperatorMatrix(
            C3,
            {
                (1, 2, 0): t(3).scale(half), (2, 1, 0): t(3).scale(-half),
                (2, 3, 0): t(1).scale(half), (3, 2, 0): t(1).scale(-half),
                (3, 1, 0): t(2).scale(half), (1, 3, 0): t(2).scale(-half),
            },
        )
        assert operator_to_bivector(linear) == s
        H = hydrodynamic_operator(I3)
        assert schouten_local(H, s).is_zero()
        assert is_hamiltonian(H + s)
        A = {(1, 2, 3): 1, (2, 1, 3): -1, (2, 3, 1): 1, (3, 2, 1): -1, (3, 1, 2): 1, (1, 3, 2): -1}
        assert dn_check(DNSpec(I3, A, [[0] * 3] * 3)).direct

    def test_tau_of_tilde_only(self):
        x = EuclidElement.make(I3, alpha_tilde=th(1) * th(2))
        assert tau(x) == ConeElement.of(tau0(x.alpha_tilde))
        assert twisted_cone_diff(I3, tau(x)).is_zero()

    def test_T_on_tilde_free(self):
        u = C3.t(1) * th(2) + C3.t(2) ** 2 * th(1) * th(3)
        assert T_map(ConeElement.of(u), I3) == ConeElement(u, d0_op(I3, u).scale(F(1, 2)))

    def test_rejects_inhomogeneous(self):
        with pytest.raises(ValueError):
            tau(EuclidElement.make(I3, alpha_tilde=th(1), alpha=th(1) * th(2) * th(3)))

    @given(rngs)
    def test_identities(self, rng):
        eta = _metric(rng, rng.randint(1, 3))
        x, y = _euclid_element(rng, eta, rng.randint(-1, 2)), _euclid_element(rng, eta, rng.randint(-1, 2))
        if None in (x.degree(), y.degree()):
            return
        tx = tau(x)
        assert twisted_cone_diff(eta, tx).is_zero()
        assert tau(g_bracket(x, y)) == cone_bracket(tx, tau(y))
        assert sigma(x) == integrate(tx)
        assert d_eta_functional(eta, sigma(x)).is_zero()
        assert sigma(g_bracket(x, y)) == schouten_local(sigma(x), sigma(y))
        T = T_map(tx, eta)
        assert T.tilde == tau0(x.alpha).without_constant()
        assert T.body == tau0(x.alpha_tilde) + metric_euler(eta, tau0(x.alpha))
        z = _cone_element(rng, eta.context(), rng.randint(-1, 2), rng.randint(0, 2))
        assert T_map(twisted_cone_diff(eta, z), eta) == untwisted_cone_diff(eta, T_map(z, eta))

    @given(rngs)
    def test_d_and_d0_commute(self, rng):
        eta = _metric(rng, rng.randint(1, 3))
        ctx = eta.context()
        u = random_poly(rng, ctx, rng.randint(0, 2), 2, 3)
        d, d0 = (lambda v: d_op(eta, v)), (lambda v: d0_op(eta, v))
        assert not (d(d0(u)) + d0(d(u)))
        assert not d0(d0(u))
        assert not d(d(u))
        assert total_derivative(d0(u)) == d0(total_derivative(u))
        assert total_derivative(d(u)) == d(total_derivative(u))
