"""The acceptance suite: ten numbered criteria, each a batch of exact checks.

Every criterion returns a :class:`CriterionResult` listing its individual
checks.  Two criteria contain an identity that does not hold as literally
stated; there the literal check is kept and reported as failing, next to a
check of the corrected identity.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

from .algebra import DiffPoly, JetContext, schouten_degree, schouten_finite
from .brackets import (
    ConeElement,
    LocalFunctional,
    alpha_form,
    cone_bracket,
    cone_diff,
    integrate,
    lambda_bracket,
    schouten_local,
    soloviev,
    soloviev_constant,
)
from .samples import random_coeff, random_constant_tensor, random_poly, random_symmetric_invertible


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


@dataclass
class Check:
    name: str
    passed: bool
    cases: int = 0
    detail: str = ""
    literal: bool = True

    def as_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "cases": self.cases}
        if self.detail:
            out["detail"] = self.detail
        if not self.literal:
            out["corrected"] = True
        return out


@dataclass
class CriterionResult:
    number: int
    title: str
    limit: float
    checks: List[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def in_time(self) -> bool:
        return self.seconds < self.limit

    @property
    def passed(self) -> bool:
        """All checks of the criterion as stated pass, within the time limit."""
        return self.in_time and all(c.passed for c in self.checks if c.literal)

    @property
    def corrected_passed(self) -> bool:
        """Passing once literal checks with a corrected companion are replaced by it."""
        replaced = {c.name.split(" [")[0] for c in self.checks if not c.literal}
        relevant = [c for c in self.checks if not c.literal or c.name.split(" [")[0] not in replaced]
        return self.in_time and all(c.passed for c in relevant)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"criterion {self.number:2d} {status}  {self.title}  ({self.seconds:.2f}s / {self.limit:g}s)"
        if not self.passed:
            bad = ", ".join(c.name for c in self.checks if c.literal and not c.passed) or "time limit"
            text += f"  failing: {bad}"
            if self.corrected_passed:
                text += "  | corrected identity: PASS"
        return text

    def as_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "corrected_passed": self.corrected_passed,
            "seconds": round(self.seconds, 3),
            "limit": self.limit,
            "checks": [c.as_dict() for c in self.checks],
        }


class _Tally:
    """Counts cases of one named identity and keeps the first failure."""

    def __init__(self, name: str, literal: bool = True):
        self.check = Check(name, True, literal=literal)

    def record(self, ok: bool, detail: Callable[[], str] = lambda: "") -> None:
        self.check.cases += 1
        if not ok and self.check.passed:
            self.check.passed = False
            self.check.detail = detail()


def _run(number: int, title: str, limit: float, body: Callable[[List[Check]], None]) -> CriterionResult:
    res = CriterionResult(number, title, limit)
    start = time.perf_counter()
    body(res.checks)
    res.seconds = time.perf_counter() - start
    return res


def _metric(rng: random.Random, m: int):
    from .hamiltonian import Metric

    return Metric(random_symmetric_invertible(rng, m))


# -- 1 ------------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    from .hamiltonian import is_hamiltonian, kdv_bivector, kdv_operator, operator_to_bivector

    def body(checks):
        checks.append(Check("[[Q,Q]] = 0 for the KdV density", bool(is_hamiltonian(kdv_bivector())), 1))
        Q = operator_to_bivector(kdv_operator())
        checks.append(Check("[[Q,Q]] = 0 from the skew-adjoint operator", bool(is_hamiltonian(Q)), 1))

    return _run(1, "KdV second Hamiltonian operator", 1.0, body)


# -- 2 ------------------------------------------------------------------------------


def criterion_2() -> CriterionResult:
    from .hamiltonian import check_lift, compute_lift, kdv_density, kdv_lift_family
    from .varcalc import is_exact

    def body(checks):
        q = kdv_density()
        lit = _Tally("lift family with +1/8 eps th th1 th2")
        cor = _Tally("lift family with +1/8 eps th th1 th2 [corrected -1/8]", literal=False)
        for a in (0, 1, -2):
            v = check_lift(q, kdv_lift_family(a, Fraction(1, 8)))
            lit.record(bool(v), lambda: f"a={a}: {v.witness.get('condition')} residual {v.witness.get('body')}")
            v2 = check_lift(q, kdv_lift_family(a))
            cor.record(bool(v2), lambda: f"a={a}: {v2.witness}")
        checks += [lit.check, cor.check]
        L = compute_lift(q)
        ok_lift = bool(check_lift(q, L))
        near = [a for a in (0, 1, -2) if is_exact(L.tilde - kdv_lift_family(a, Fraction(1, 8)).tilde)]
        checks.append(
            Check(
                "compute_lift tilde differs from a family member by an exact term",
                ok_lift and bool(near),
                1,
                f"computed tilde {L.tilde}" if not near else "",
            )
        )
        near2 = [a for a in (0, 1, -2) if is_exact(L.tilde - kdv_lift_family(a).tilde)]
        checks.append(
            Check(
                "compute_lift tilde differs from a family member by an exact term [corrected -1/8]",
                ok_lift and bool(near2),
                1,
                literal=False,
            )
        )

    return _run(2, "KdV lift family", 2.0, body)


# -- 3 ------------------------------------------------------------------------------


def criterion_3(seed: int = 3) -> CriterionResult:
    from .hamiltonian import check_lift, hydrodynamic_lift, hydrodynamic_operator, is_hamiltonian

    def body(checks):
        rng = random.Random(seed)
        ham = _Tally("[[H_eta, H_eta]] = 0")
        lift = _Tally("check_lift(1/2 eta^ab th_a th_1b, 0)")
        for i in range(20):
            eta = _metric(rng, 1 + i % 3)
            H = hydrodynamic_operator(eta)
            ham.record(bool(is_hamiltonian(H)), lambda: f"eta={eta.upper}")
            lift.record(bool(check_lift(H, hydrodynamic_lift(eta))), lambda: f"eta={eta.upper}")
        checks += [ham.check, lift.check]

    return _run(3, "hydrodynamic operators", 5.0, body)


# -- 4 ------------------------------------------------------------------------------


def _so3_like(rng: random.Random):
    """A consistent m=3 instance: scaled so(3) constants, eta = c*I, coboundary B."""
    from .hamiltonian import DNSpec, Metric

    s = Fraction(rng.choice((-2, -1, 1, 2)))
    A = {}
    for (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        A[a, b, c] = s
        A[b, a, c] = -s
    v = [rng.randint(-1, 1) for _ in range(3)]
    B = [[sum(A.get((a, b, c), 0) * v[c - 1] for c in range(1, 4)) for b in range(1, 4)] for a in range(1, 4)]
    scale = rng.choice((1, 2, -1))
    eta = Metric([[Fraction(scale if i == j else 0) for j in range(3)] for i in range(3)])
    return DNSpec(eta, A, tuple(tuple(r) for r in B))


def _random_dn(rng: random.Random, m: int):
    from .hamiltonian import DNSpec, Metric

    eta = Metric(random_symmetric_invertible(rng, m, span=1))
    A = {}
    for a in range(1, m + 1):
        for b in range(a + 1, m + 1):
            for c in range(1, m + 1):
                val = rng.choice((-1, 0, 0, 1))
                if val:
                    A[a, b, c] = Fraction(val)
                    A[b, a, c] = Fraction(-val)
    B = [[Fraction(0)] * m for _ in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            B[a][b] = Fraction(rng.choice((-1, 0, 1)))
            B[b][a] = -B[a][b]
    return DNSpec(eta, A, tuple(tuple(r) for r in B))


DN_GRID_METRICS = (((1, 0), (0, 1)), ((1, 0), (0, -1)), ((0, 1), (1, 0)))


def criterion_4(seed: int = 4) -> CriterionResult:
    from .hamiltonian import DNSpec, Metric, dn_check

    def body(checks):
        grid = _Tally("m=2 grid: (Jacobi and Killing and cocycle) iff [[Q,Q]] = 0")
        hits = [0, 0]
        for rows in DN_GRID_METRICS:
            eta = Metric([[Fraction(x) for x in r] for r in rows])
            for a1, a2, b in product((-1, 0, 1), repeat=3):
                A = {}
                if a1:
                    A[1, 2, 1], A[2, 1, 1] = Fraction(a1), Fraction(-a1)
                if a2:
                    A[1, 2, 2], A[2, 1, 2] = Fraction(a2), Fraction(-a2)
                spec = DNSpec(eta, A, ((0, b), (-b, 0)))
                rep = dn_check(spec)
                hits[bool(rep.direct)] += 1
                grid.record(rep.consistent, lambda: f"eta={rows} A12=({a1},{a2}) B12={b}")
        grid.check.detail = grid.check.detail or f"{hits[1]} Hamiltonian, {hits[0]} not"
        rng = random.Random(seed)
        rand = _Tally("m=3 random: (Jacobi and Killing and cocycle) iff [[Q,Q]] = 0")
        hits3 = [0, 0]
        for i in range(50):
            spec = _so3_like(rng) if i % 2 else _random_dn(rng, 3)
            rep = dn_check(spec)
            hits3[bool(rep.direct)] += 1
            rand.record(rep.consistent, lambda: f"A={spec.A} B={spec.B} eta={spec.eta.upper}")
        rand.check.detail = rand.check.detail or f"{hits3[1]} Hamiltonian, {hits3[0]} not"
        checks += [grid.check, rand.check]

    return _run(4, "first-order operator equivalence", 60.0, body)


# -- 5 ------------------------------------------------------------------------------


def _jet_triple(rng: random.Random, ctx: JetContext, max_theta: int, order: int, terms: int = 2):
    return [random_poly(rng, ctx, rng.randint(0, max_theta), order, terms, 2) for _ in range(3)]


def _axioms(tally_anti: _Tally, tally_jac: _Tally, br, deg, zero, u, v, w) -> None:
    """Graded antisymmetry and Jacobi in the form ``[u,[v,w]] = [[u,v],w] + s [v,[u,w]]``."""
    pu, pv = deg(u), deg(v)
    s = _sign(pu * pv)
    tally_anti.record(zero(br(u, v) + br(v, u).scale(s)), lambda: f"{u} | {v}")
    J = br(u, br(v, w)) - br(br(u, v), w) - br(v, br(u, w)).scale(s)
    tally_jac.record(zero(J), lambda: f"{u} | {v} | {w}")


def criterion_5(seed: int = 5, cases: int = 100) -> CriterionResult:
    from .euclid import g_bracket, h_bracket

    def body(checks):
        rng = random.Random(seed)
        is_zero = lambda x: not x

        anti, jac = _Tally("schouten_finite antisymmetry"), _Tally("schouten_finite Jacobi")
        for _ in range(cases):
            ctx = JetContext.omega(rng.randint(1, 3))
            u, v, w = _jet_triple(rng, ctx, 3, 0, 3)
            _axioms(anti, jac, schouten_finite, schouten_degree, is_zero, u, v, w)
        checks += [anti.check, jac.check]

        for nu in (0, 1):
            anti, jac = _Tally(f"soloviev_constant nu={nu} antisymmetry"), _Tally(f"soloviev_constant nu={nu} Jacobi")
            for _ in range(cases):
                ctx = JetContext(rng.randint(1, 2), rng.randint(1, 2))
                P = random_constant_tensor(rng, ctx, nu)
                u, v, w = _jet_triple(rng, ctx, min(3, 2 * ctx.odd_count), rng.randint(0, 3))
                br = lambda x, y: soloviev_constant(P, x, y)
                _axioms(anti, jac, br, lambda x: x.parity() + nu, is_zero, u, v, w)
            checks += [anti.check, jac.check]

        anti, jac = _Tally("lambda_bracket antisymmetry"), _Tally("lambda_bracket Jacobi")
        for _ in range(cases):
            ctx = JetContext.omega(rng.randint(1, 2))
            u, v, w = _jet_triple(rng, ctx, 3, rng.randint(0, 3))
            _axioms(anti, jac, lambda_bracket, schouten_degree, is_zero, u, v, w)
        checks += [anti.check, jac.check]

        anti, jac = _Tally("schouten_local antisymmetry"), _Tally("schouten_local Jacobi")
        for _ in range(cases):
            ctx = JetContext.omega(rng.randint(1, 2))
            u, v, w = [LocalFunctional(x) for x in _jet_triple(rng, ctx, 3, rng.randint(0, 3))]
            _axioms(anti, jac, schouten_local, lambda x: x.degree(), lambda x: x.is_zero(), u, v, w)
        checks += [anti.check, jac.check]

        anti, jac = _Tally("g_bracket antisymmetry"), _Tally("g_bracket Jacobi")
        hanti, hjac = _Tally("h_bracket antisymmetry"), _Tally("h_bracket Jacobi")
        done = 0
        while done < cases:
            n = rng.randint(1, 4)
            eta = _metric(rng, n)
            xs = [_euclid_element(rng, eta, rng.randint(-1, 2)) for _ in range(3)]
            if any(x.degree() is None for x in xs):
                continue
            done += 1
            _axioms(anti, jac, g_bracket, lambda x: x.degree(), lambda x: x.is_zero(), *xs)
            hs = [x.alpha for x in xs]
            if all(hs):
                _axioms(hanti, hjac, lambda a, b: h_bracket(eta, a, b), lambda a: a.theta_degree() - 2, is_zero, *hs)
        while hanti.check.cases < cases:
            n = rng.randint(1, 4)
            eta = _metric(rng, n)
            hs = [_exterior(rng, eta.context(), rng.randint(1, n)) for _ in range(3)]
            if all(hs):
                _axioms(hanti, hjac, lambda a, b: h_bracket(eta, a, b), lambda a: a.theta_degree() - 2, is_zero, *hs)
        checks += [anti.check, jac.check, hanti.check, hjac.check]

    return _run(5, "bracket axioms", 120.0, body)


def _exterior(rng: random.Random, ctx: JetContext, degree: int, density: float = 0.7) -> DiffPoly:
    from .euclid import exterior_basis, exterior_from_coeffs

    if degree < 0:
        return ctx.zero()
    basis = exterior_basis(ctx, degree)
    return exterior_from_coeffs(ctx, degree, [random_coeff(rng) if rng.random() < density else 0 for _ in basis])


def _euclid_element(rng: random.Random, eta, p: int):
    from .euclid import EuclidElement

    ctx = eta.context()
    return EuclidElement(_exterior(rng, ctx, p + 1), _exterior(rng, ctx, p + 2), eta)


# -- 6 ------------------------------------------------------------------------------


def criterion_6(seed: int = 6, cases: int = 100) -> CriterionResult:
    from .varcalc import CoordinateMap, euler, pullback, sl2_rho, sl2_weight, total_derivative

    def body(checks):
        rng = random.Random(seed)
        shift = _Tally("delta_{k,a} d = delta_{k-1,a}, delta_{0,a} d = 0")
        for _ in range(cases):
            ctx = JetContext(rng.randint(1, 2), rng.randint(0, 2))
            u = random_poly(rng, ctx, rng.randint(0, min(2, ctx.odd_count)), rng.randint(0, 3), 3)
            du = total_derivative(u)
            ok = True
            for x in ctx.base_coordinates():
                kind = "odd" if x.odd else "even"
                for k in range(0, u.max_order() + 3):
                    lhs = euler(du, (kind, x.index), k)
                    rhs = euler(u, (kind, x.index), k - 1) if k else ctx.zero()
                    ok = ok and lhs == rhs
            shift.record(ok, lambda: str(u))
        checks.append(shift.check)

        const = _Tally("soloviev = soloviev_constant for constant tensors")
        for _ in range(cases):
            ctx = JetContext(rng.randint(1, 2), rng.randint(0, 2))
            nu = rng.randint(0, 1)
            P = random_constant_tensor(rng, ctx, nu)
            u, v = [random_poly(rng, ctx, rng.randint(0, min(2, ctx.odd_count)), rng.randint(0, 3), 2) for _ in range(2)]
            const.record(soloviev(P, u, v) == soloviev_constant(P, u, v), lambda: f"{u} | {v}")
        checks.append(const.check)

        sym = _Tally("alpha(u|v,w) graded symmetric in v, w")
        dec = _Tally("{{u,v},w} = alpha(u|v,w) - s alpha(v|u,w)")
        for _ in range(cases):
            ctx = JetContext(rng.randint(1, 2), rng.randint(0, 2))
            nu = rng.randint(0, 1)
            P = random_constant_tensor(rng, ctx, nu)
            u, v, w = [random_poly(rng, ctx, rng.randint(0, min(2, ctx.odd_count)), 2, 2) for _ in range(3)]
            pu, pv, pw = (x.parity() + nu for x in (u, v, w))
            a = alpha_form(u, v, w, P)
            sym.record(a == alpha_form(u, w, v, P).scale(_sign(pv * pw)), lambda: f"{u} | {v} | {w}")
            br = lambda x, y: soloviev_constant(P, x, y)
            dec.record(br(br(u, v), w) == a - alpha_form(v, u, w, P).scale(_sign(pu * pv)), lambda: f"{u} | {v} | {w}")
        checks += [sym.check, dec.check]

        chain = _Tally("delta_{k,a}(f* u) = J_a^b f*(delta_{k,b} u)")
        while chain.check.cases < cases:
            ctx = JetContext(rng.randint(1, 2), rng.randint(0, 2))
            targets = []
            for x in ctx.base_coordinates():
                extra = random_poly(rng, ctx, 1 if x.odd else 0, 0, 2, 2 if not x.odd else 1, constant=x.odd)
                targets.append(ctx.var(x) + extra if rng.random() < 0.8 else ctx.var(x))
            f = CoordinateMap(ctx, tuple(targets))
            u = random_poly(rng, ctx, rng.randint(0, min(2, ctx.odd_count)), 2, 2)
            k = rng.randint(0, 2)
            coords = ctx.base_coordinates()
            ok = True
            for ai, x in enumerate(coords):
                lhs = euler(pullback(f, u), ("odd" if x.odd else "even", x.index), k)
                rhs = ctx.zero()
                for bi, y in enumerate(coords):
                    J = f.jacobian[ai][bi]
                    if J:
                        rhs = rhs + J * pullback(f, euler(u, ("odd" if y.odd else "even", y.index), k))
                ok = ok and lhs == rhs
            chain.record(ok, lambda: f"u={u} f={[str(t) for t in targets]} k={k}")
        checks.append(chain.check)

        hd, hr, dr = _Tally("[H, d] = d"), _Tally("[H, rho] = -rho"), _Tally("[d, rho] = -2H")
        for _ in range(cases):
            ctx = JetContext(rng.randint(1, 2), rng.randint(0, 2))
            u = random_poly(rng, ctx, rng.randint(0, min(2, ctx.odd_count)), rng.randint(0, 3), 3)
            D, R, H = total_derivative, sl2_rho, sl2_weight
            hd.record(H(D(u)) - D(H(u)) == D(u), lambda: str(u))
            hr.record(H(R(u)) - R(H(u)) == -R(u), lambda: str(u))
            dr.record(D(R(u)) - R(D(u)) == H(u).scale(-2), lambda: str(u))
        checks += [hd.check, hr.check, dr.check]

    return _run(6, "identities from proofs", 120.0, body)


# -- 7 ------------------------------------------------------------------------------


def _cone_element(rng: random.Random, ctx: JetContext, degree: int, order: int) -> ConeElement:
    """Body of Schouten degree ``degree`` (theta degree ``degree + 1``), tilde one theta higher."""
    body = random_poly(rng, ctx, degree + 1, order, 2) if degree + 1 >= 0 else ctx.zero()
    tilde = random_poly(rng, ctx, degree + 2, order, 2) if rng.random() < 0.8 else ctx.zero()
    return ConeElement(body, tilde)


def criterion_7(seed: int = 7, cases: int = 100) -> CriterionResult:
    def body(checks):
        rng = random.Random(seed)
        sq, der, ker, mor = (
            _Tally("D^2 = 0"),
            _Tally("D [x,y] = [Dx,y] + (-1)^|x| [x,Dy]"),
            _Tally("int D = 0"),
            _Tally("int [x,y] = [[int x, int y]]"),
        )
        for _ in range(cases):
            ctx = JetContext.omega(rng.randint(1, 2))
            x = _cone_element(rng, ctx, rng.randint(-1, 1), rng.randint(0, 3))
            y = _cone_element(rng, ctx, rng.randint(-1, 1), rng.randint(0, 3))
            p = x.degree() or 0
            sq.record(cone_diff(cone_diff(x)).is_zero(), lambda: f"{x}")
            lhs = cone_diff(cone_bracket(x, y))
            rhs = cone_bracket(cone_diff(x), y) + cone_bracket(x, cone_diff(y)).scale(_sign(p))
            der.record((lhs - rhs).is_zero(), lambda: f"{x} | {y}")
            ker.record(integrate(cone_diff(x)).is_zero(), lambda: f"{x}")
            mor.record(integrate(cone_bracket(x, y)) == schouten_local(integrate(x), integrate(y)), lambda: f"{x} | {y}")
        checks += [sq.check, der.check, ker.check, mor.check]

    return _run(7, "cone and integration", 30.0, body)


# -- 8 ------------------------------------------------------------------------------


def criterion_8(seed: int = 8, cases: int = 100) -> CriterionResult:
    from .euclid import (
        T_map,
        g_bracket,
        metric_euler,
        sigma,
        tau,
        tau0,
        twisted_cone_diff,
        untwisted_cone_diff,
    )
    from .hamiltonian import d_eta_functional

    def body(checks):
        rng = random.Random(seed)
        chain = _Tally("(D + d_eta) tau = 0")
        morph = _Tally("tau [x,y] = [tau x, tau y]")
        inter = _Tally("T (D + d_eta) = (D - d) T")
        ttau = _Tally("T tau(a~, a) = tau0(a~) + eps tau0(a)")
        ttau_fix = _Tally("T tau(a~, a) = tau0(a~) + eps tau0(a) [corrected: body keeps eta_ab t^a d^b tau0(a)]", literal=False)
        sig_int = _Tally("sigma = int tau, closed under d_eta")
        sig_mor = _Tally("sigma [x,y] = [[sigma x, sigma y]]")
        while chain.check.cases < cases:
            n = rng.randint(1, 3)
            eta = _metric(rng, n)
            x = _euclid_element(rng, eta, rng.randint(-1, 2))
            y = _euclid_element(rng, eta, rng.randint(-1, 2))
            if x.degree() is None or y.degree() is None:
                continue
            tx = tau(x)
            chain.record(twisted_cone_diff(eta, tx).is_zero(), lambda: f"{x}")
            morph.record((tau(g_bracket(x, y)) - cone_bracket(tx, tau(y))).is_zero(), lambda: f"{x} | {y}")
            T = T_map(tx, eta)
            a_t, a = tau0(x.alpha_tilde), tau0(x.alpha)
            ttau.record(T.body == a_t and T.tilde == a.without_constant(), lambda: f"x={x}: T tau = {T}")
            ttau_fix.record(
                T.body == a_t + metric_euler(eta, a) and T.tilde == a.without_constant(), lambda: f"x={x}: T tau = {T}"
            )
            s = sigma(x)
            sig_int.record(s == integrate(tx) and d_eta_functional(eta, s).is_zero(), lambda: f"{x}")
            sig_mor.record(sigma(g_bracket(x, y)) == schouten_local(s, sigma(y)), lambda: f"{x} | {y}")
        while inter.check.cases < cases:
            n = rng.randint(1, 3)
            eta = _metric(rng, n)
            ctx = eta.context()
            z = _cone_element(rng, ctx, rng.randint(-1, 2), rng.randint(0, 2))
            lhs = T_map(twisted_cone_diff(eta, z), eta)
            rhs = untwisted_cone_diff(eta, T_map(z, eta))
            inter.record((lhs - rhs).is_zero(), lambda: f"{z}")
        checks += [chain.check, morph.check, inter.check, ttau.check, ttau_fix.check, sig_int.check, sig_mor.check]

    return _run(8, "maps from g(V, eta) into the cone", 60.0, body)


# -- 9 ------------------------------------------------------------------------------


def _truncated(rng: random.Random, carrier, N: int, p: int):
    from .deligne import TruncatedElement

    return TruncatedElement(carrier, tuple(_euclid_element(rng, carrier.metric, p) for _ in range(N)))


def _mc_seed(rng: random.Random, eta):
    from .euclid import g_bracket

    for _ in range(50):
        x = _euclid_element(rng, eta, 1)
        if g_bracket(x, x).is_zero():
            return x
    from .euclid import EuclidElement

    return EuclidElement.make(eta, alpha_tilde=_exterior(rng, eta.context(), 2))


def _random_mc(rng: random.Random, carrier, N: int):
    """A Maurer-Cartan element: a gauge transform of ``hbar x`` for an MC ``x`` of ``g`` (or of 0)."""
    from .deligne import TruncatedElement, gauge_act

    start = TruncatedElement.zero(carrier, N)
    if carrier.base is None:
        start = TruncatedElement.single(carrier, N, 1, _mc_seed(rng, carrier.metric))
    return gauge_act(_truncated(rng, carrier, N, 0), start)


def criterion_9(seed: int = 9, cases: int = 50) -> CriterionResult:
    from .deligne import (
        EuclidCarrier,
        MatrixCarrier,
        SchoutenCarrier,
        TruncatedElement,
        TwoMorphism,
        bch,
        bracket_A,
        carrier_curvature,
        compose_horizontal,
        compose_vertical,
        curvature,
        d_A,
        derived_bracket,
        exp_ad,
        gauge_act,
        is_maurer_cartan,
    )
    from .hamiltonian import Metric

    def body(checks):
        rng = random.Random(seed)
        assoc = _Tally("bch associativity")
        action = _Tally("gauge_act(bch(Y,X), A) = gauge_act(Y, gauge_act(X, A))")
        curv = _Tally("curvature preserved (MC A)")
        covar = _Tally("Q(exp(X)*A) = e^(ad X) Q(A) for arbitrary A")
        fixed = _Tally("exp(X)*A = A iff d_A X = 0")
        skew = _Tally("{u,v}_A skew")
        jac_mc = _Tally("{,}_A Jacobi for MC A")
        inter = _Tally("interchange law")
        for i in range(cases):
            n = rng.randint(2, 4)
            eta = Metric.identity(n) if i % 2 else _metric(rng, n)
            base = _mc_seed(rng, eta) if rng.random() < 0.5 else None
            car = EuclidCarrier(eta, base)
            N = rng.randint(1, 3)
            A = _random_mc(rng, car, N)
            X, Y, Z = (_truncated(rng, car, N, 0) for _ in range(3))
            assoc.record(bch(bch(X, Y), Z) == bch(X, bch(Y, Z)), lambda: f"N={N}")
            action.record(gauge_act(bch(Y, X), A) == gauge_act(Y, gauge_act(X, A)), lambda: f"N={N}")
            curv.record(is_maurer_cartan(A) and is_maurer_cartan(gauge_act(X, A)), lambda: f"N={N}")
            Ar = _truncated(rng, car, N, 1)
            covar.record(curvature(gauge_act(X, Ar)) == exp_ad(X, curvature(Ar)), lambda: f"N={N}")
            u = _truncated(rng, car, N, -1)
            closed = d_A(A, u)
            ok = gauge_act(closed, A) == A
            if not d_A(A, X).is_zero():
                ok = ok and not gauge_act(X, A) == A
            fixed.record(ok, lambda: f"N={N}")
            v, w = _truncated(rng, car, N, -1), _truncated(rng, car, N, -1)
            br = lambda a, b: bracket_A(A, a, b)
            skew.record((br(u, v) + br(v, u)).is_zero(), lambda: f"N={N}")
            jac_mc.record((br(u, br(v, w)) - br(v, br(u, w)) - br(br(u, v), w)).is_zero(), lambda: f"N={N}")
            first = TwoMorphism(u, X, A)
            second = TwoMorphism(v, first.target, A)
            B = gauge_act(X, A)
            third = TwoMorphism(w, Y, B)
            fourth = TwoMorphism(_truncated(rng, car, N, -1), third.target, B)
            lhs = compose_vertical(compose_horizontal(fourth, second), compose_horizontal(third, first))
            rhs = compose_horizontal(compose_vertical(fourth, third), compose_vertical(second, first))
            inter.record(lhs == rhs, lambda: f"N={N}")
        checks += [assoc.check, action.check, curv.check, covar.check, fixed.check, skew.check, jac_mc.check, inter.check]

        # Jacobi of [d_A u, v] against the curvature, untruncated.  The Jacobiator is a
        # derivation in each slot, so coordinate triples decide whether it vanishes.
        iff = _Tally("{,}_A Jacobi iff A is Maurer-Cartan")
        seen = [0, 0]
        for _ in range(cases):
            ctx = JetContext.omega(rng.randint(2, 3))
            car = SchoutenCarrier(ctx)
            A = random_poly(rng, ctx, 2, 0, rng.randint(1, 3), 2)
            mc = not carrier_curvature(car, A)
            br = lambda a, b: derived_bracket(car, A, a, b)
            coords = [ctx.t(a) for a in range(1, ctx.even_count + 1)]
            triples = list(product(coords, repeat=3))
            triples += [tuple(random_poly(rng, ctx, 0, 0, 3, 2) for _ in range(3)) for _ in range(3)]
            jacobi = all(not (br(a, br(b, c)) - br(b, br(a, c)) - br(br(a, b), c)) for a, b, c in triples)
            seen[mc] += 1
            iff.record(mc == jacobi, lambda: f"A={A}")
        iff.check.detail = iff.check.detail or f"{seen[1]} Maurer-Cartan, {seen[0]} not"
        checks.append(iff.check)

        # BCH against exp/log of nilpotent block matrices
        oracle = _Tally("bch = log(exp X exp Y) for block-nilpotent matrices")
        for _ in range(cases):
            size, N = rng.randint(1, 3), rng.randint(1, 3)
            car = MatrixCarrier(size)
            rand = lambda: tuple(tuple(Fraction(rng.randint(-2, 2)) for _ in range(size)) for _ in range(size))
            Xs, Ys = [rand() for _ in range(N)], [rand() for _ in range(N)]
            got = bch(TruncatedElement(car, tuple(Xs)), TruncatedElement(car, tuple(Ys)))
            oracle.record(got.coeffs == _matrix_bch(size, N, Xs, Ys), lambda: f"N={N}")
        checks.append(oracle.check)

    return _run(9, "deformations over hbar C[hbar]/hbar^(N+1)", 60.0, body)


def _matrix_bch(n: int, N: int, Xs, Ys):
    """``log(exp X exp Y)`` computed with ``sum_i hbar^i X_i`` as a nilpotent block matrix."""
    size = n * (N + 1)

    def block(cs):
        M = [[Fraction(0)] * size for _ in range(size)]
        for i, c in enumerate(cs, 1):
            for blk in range(N + 1 - i):
                for r in range(n):
                    for s in range(n):
                        M[blk * n + r][(blk + i) * n + s] += c[r][s]
        return M

    def mm(P, Q):
        return [[sum(P[i][k] * Q[k][j] for k in range(size)) for j in range(size)] for i in range(size)]

    def add(P, Q, c=1):
        return [[P[i][j] + c * Q[i][j] for j in range(size)] for i in range(size)]

    eye = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]

    def expm(P):
        out, term = eye, eye
        for k in range(1, N + 1):
            term = [[x / k for x in row] for row in mm(term, P)]
            out = add(out, term)
        return out

    def logm(P):
        R = add(P, eye, -1)
        out, term = [[Fraction(0)] * size for _ in range(size)], eye
        for k in range(1, N + 1):
            term = mm(term, R)
            out = add(out, term, Fraction((-1) ** (k - 1), k))
        return out

    L = logm(mm(expm(block(Xs)), expm(block(Ys))))
    return tuple(tuple(tuple(L[r][i * n + s] for s in range(n)) for r in range(n)) for i in range(1, N + 1))


# -- 10 -----------------------------------------------------------------------------


def criterion_10(seed: int = 10, cases: int = 50) -> CriterionResult:
    from .euclid import EuclidElement, exterior_basis, exterior_from_coeffs, mc_to_lie
    from .hamiltonian import Metric

    def body(checks):
        eta = Metric.identity(3)
        ctx = eta.context()
        full = _Tally("n=3 enumeration: MC iff (Jacobi and cocycle)")
        hits = [0, 0]
        b2, b3 = exterior_basis(ctx, 2), exterior_basis(ctx, 3)
        for coeffs in product((-1, 0, 1), repeat=len(b2) + len(b3)):
            x = EuclidElement(
                exterior_from_coeffs(ctx, 2, coeffs[: len(b2)]), exterior_from_coeffs(ctx, 3, coeffs[len(b2):]), eta
            )
            rep = mc_to_lie(x)
            hits[bool(rep.maurer_cartan)] += 1
            full.record(rep.consistent, lambda: f"{x}")
        full.check.detail = full.check.detail or f"{hits[1]} MC, {hits[0]} not"
        rng = random.Random(seed)
        rand = _Tally("n=4 random: MC iff (Jacobi and cocycle)")
        hits4 = [0, 0]
        for i in range(cases):
            eta4 = Metric.identity(4) if i % 2 else _metric(rng, 4)
            c4 = eta4.context()
            if i % 3 == 0:
                # decomposable alpha = e1 e2 e3 in a random frame gives an MC element
                frame = [_exterior(rng, c4, 1, 0.9) or c4.th(1) for _ in range(3)]
                alpha = frame[0] * frame[1] * frame[2]
                x = EuclidElement(c4.zero(), alpha, eta4)
            else:
                x = _euclid_element(rng, eta4, 1)
            rep = mc_to_lie(x)
            hits4[bool(rep.maurer_cartan)] += 1
            rand.record(rep.consistent, lambda: f"{x}")
        rand.check.detail = rand.check.detail or f"{hits4[1]} MC, {hits4[0]} not"
        checks += [full.check, rand.check]

    return _run(10, "Maurer-Cartan elements of g(V, eta) as Lie algebras with cocycle", 60.0, body)


CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def _run_one(number: int) -> CriterionResult:
    return CRITERIA[number]()


def run_all(only: Optional[Sequence[int]] = None, jobs: int = 1) -> List[CriterionResult]:
    numbers = sorted(only) if only else sorted(CRITERIA)
    unknown = [n for n in numbers if n not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria: {unknown}")
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, numbers))
    return [_run_one(n) for n in numbers]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Print one line per criterion; exit 1 if any fails as stated."""
    import argparse

    parser = argparse.ArgumentParser(prog="python -m formalvar.acceptance")
    parser.add_argument("numbers", nargs="*", type=int, help="criteria to run (default: all)")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)
    results = run_all(args.numbers or None, jobs=args.jobs)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
