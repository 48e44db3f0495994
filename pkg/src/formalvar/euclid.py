"""The graded Lie algebra ``g(V, eta) = O[1] x| h(V, eta)`` and its maps into the cone.

Exterior elements over ``V`` (dimension ``n``) are DiffPolys in the odd
variables ``th[a,0]`` of ``JetContext.omega(n)``, so substituting jet
variables for exterior generators is the identity on representations.
An element of degree ``p`` is a pair ``(alpha_tilde, alpha)`` with theta
degrees ``p+1`` and ``p+2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .algebra import DiffPoly, JetContext, Verdict, partial_id, var_id
from .brackets import ConeElement, LocalFunctional, cone_bracket, cone_diff
from .hamiltonian import Metric, hydrodynamic_density, theta_shift_operator
from .varcalc import total_derivative


def _require_exterior(x: DiffPoly) -> None:
    if x.max_order() > 0 or any(not v.odd for v in x.variables()):
        raise ValueError("exterior elements use only th[a,0]")


def contract(eta: Metric, x: DiffPoly, y: DiffPoly) -> DiffPoly:
    """``eta_ab d^a x d^b y`` with left derivatives in ``th[.,0]``."""
    ctx = x.ctx
    out = ctx.zero()
    n = eta.dim
    dx = [partial_id(x, True, var_id(a, 0)) for a in range(1, n + 1)]
    dy = [partial_id(y, True, var_id(b, 0)) for b in range(1, n + 1)]
    for a in range(n):
        if not dx[a]:
            continue
        for b in range(n):
            c = eta.lower[a][b]
            if c and dy[b]:
                out = out + (dx[a] * dy[b]).scale(c)
    return out


def h_bracket(eta: Metric, alpha: DiffPoly, beta: DiffPoly) -> DiffPoly:
    """``{alpha, beta} = (-1)^(p+1) eta_ab d^a alpha d^b beta``, ``p = deg(alpha) - 2``."""
    if not alpha or not beta:
        return alpha.ctx.zero()
    p = alpha.theta_degree() - 2
    r = contract(eta, alpha, beta)
    return r if p % 2 else -r


def module_action(eta: Metric, alpha: DiffPoly, beta_tilde: DiffPoly) -> DiffPoly:
    """``alpha * beta~ = -eta_ab d^a alpha d^b beta~``."""
    return -contract(eta, alpha, beta_tilde)


@dataclass(frozen=True)
class EuclidElement:
    alpha_tilde: DiffPoly
    alpha: DiffPoly
    metric: Metric

    def __post_init__(self):
        if self.alpha_tilde.ctx != self.alpha.ctx or self.alpha.ctx != self.metric.context():
            raise ValueError("euclid element context mismatch")
        _require_exterior(self.alpha_tilde)
        _require_exterior(self.alpha)
        self.degree()

    @classmethod
    def make(cls, metric: Metric, alpha_tilde=None, alpha=None) -> "EuclidElement":
        ctx = metric.context()
        return cls(alpha_tilde if alpha_tilde is not None else ctx.zero(), alpha if alpha is not None else ctx.zero(), metric)

    @property
    def ctx(self) -> JetContext:
        return self.alpha.ctx

    def degree(self) -> Optional[int]:
        degs = set()
        if self.alpha_tilde:
            degs.add(self.alpha_tilde.theta_degree() - 1)
        if self.alpha:
            degs.add(self.alpha.theta_degree() - 2)
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element of g(V, eta): degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def is_zero(self) -> bool:
        return not self.alpha_tilde and not self.alpha

    def __add__(self, other: "EuclidElement") -> "EuclidElement":
        return EuclidElement(self.alpha_tilde + other.alpha_tilde, self.alpha + other.alpha, self.metric)

    def __sub__(self, other: "EuclidElement") -> "EuclidElement":
        return EuclidElement(self.alpha_tilde - other.alpha_tilde, self.alpha - other.alpha, self.metric)

    def __neg__(self) -> "EuclidElement":
        return EuclidElement(-self.alpha_tilde, -self.alpha, self.metric)

    def scale(self, c) -> "EuclidElement":
        return EuclidElement(self.alpha_tilde.scale(c), self.alpha.scale(c), self.metric)


def g_bracket(x: EuclidElement, y: EuclidElement) -> EuclidElement:
    """Semidirect-product bracket ``(a * b~ - (-1)^(pq) b * a~, {a, b})``."""
    eta = x.metric
    if x.is_zero() or y.is_zero():
        return EuclidElement.make(eta)
    p, q = x.degree(), y.degree()
    tilde = module_action(eta, x.alpha, y.alpha_tilde)
    other = module_action(eta, y.alpha, x.alpha_tilde)
    tilde = tilde - other if (p * q) % 2 == 0 else tilde + other
    return EuclidElement(tilde, h_bracket(eta, x.alpha, y.alpha), eta)


# -- Maurer-Cartan elements and the Lie algebra they define ------------------------


@dataclass(frozen=True)
class LieDictionary:
    """Bracket ``[e_a, e_b] = sum_c const[a][b][c] e_c`` on ``V*`` and a 2-cochain ``omega``."""

    structure: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
    cocycle: Tuple[Tuple[Fraction, ...], ...]
    maurer_cartan: Verdict
    jacobi: Verdict
    cocycle_ok: Verdict

    @property
    def consistent(self) -> bool:
        return bool(self.maurer_cartan) == bool(self.jacobi and self.cocycle_ok)


def _coefficients_deg1(u: DiffPoly, n: int) -> Tuple[Fraction, ...]:
    out = []
    for c in range(1, n + 1):
        out.append(Fraction(partial_id(u, True, var_id(c, 0)).constant_term()))
    return tuple(out)


def mc_to_lie(x: EuclidElement) -> LieDictionary:
    """Read off ``[x,y]_alpha = [[(0,alpha),(0,x)],(0,y)]`` and the 2-cocycle of ``alpha~``.

    Probes are the basis ``th[a,0]`` of degree ``-1``.
    """
    if x.degree() not in (1, None):
        raise ValueError("mc_to_lie needs a degree 1 element")
    eta, ctx, n = x.metric, x.ctx, x.metric.dim
    basis = [EuclidElement.make(eta, alpha=ctx.th(a, 0)) for a in range(1, n + 1)]
    head = EuclidElement.make(eta, alpha=x.alpha)
    structure = []
    cocycle = []
    for ea in basis:
        row = []
        crow = []
        inner = g_bracket(head, ea)
        inner_full = g_bracket(x, ea)
        for eb in basis:
            row.append(_coefficients_deg1(g_bracket(inner, eb).alpha, n))
            crow.append(Fraction(g_bracket(inner_full, eb).alpha_tilde.constant_term()))
        structure.append(tuple(row))
        cocycle.append(tuple(crow))
    structure_t = tuple(structure)
    cocycle_t = tuple(cocycle)

    def br(a, b):
        return structure_t[a][b]

    jac = None
    for a in range(n):
        for b in range(n):
            for c in range(n):
                total = [Fraction(0)] * n
                for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
                    for m, coef in enumerate(br(i, j)):
                        if coef:
                            for e, v in enumerate(br(m, k)):
                                total[e] += coef * v
                if any(total):
                    jac = jac or {"indices": [a + 1, b + 1, c + 1], "residual": [str(t) for t in total]}
    coc = None
    for a in range(n):
        for b in range(n):
            for c in range(n):
                s = Fraction(0)
                for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
                    for m, coef in enumerate(br(i, j)):
                        s += coef * cocycle_t[m][k]
                if s:
                    coc = coc or {"indices": [a + 1, b + 1, c + 1], "residual": str(s)}
    sq = g_bracket(x, x)
    mc = Verdict(sq.is_zero(), None if sq.is_zero() else {"tilde": sq.alpha_tilde, "alpha": sq.alpha})
    return LieDictionary(structure_t, cocycle_t, mc, Verdict(jac is None, jac), Verdict(coc is None, coc))


def vector_pairing(eta: Metric, v: Sequence, z: DiffPoly) -> Fraction:
    """``eta_ab v^a z^b`` for a degree-one exterior element ``z = z^b th[b]``."""
    zc = _coefficients_deg1(z, eta.dim)
    return sum((eta.lower[a][b] * Fraction(v[a]) * zc[b] for a in range(eta.dim) for b in range(eta.dim)), Fraction(0))


def contract_vector(eta: Metric, v: Sequence, alpha: DiffPoly) -> DiffPoly:
    """``eta_ab v^a d^b alpha``; as a cochain it is ``(x, y) -> v([x, y]_alpha)``.

    Cochains are read as in :func:`mc_to_lie` and ``v`` pairs with ``V*``
    through :func:`vector_pairing`.
    """
    out = alpha.ctx.zero()
    for a in range(eta.dim):
        if not v[a]:
            continue
        for b in range(eta.dim):
            c = eta.lower[a][b]
            if c:
                out = out + partial_id(alpha, True, var_id(b + 1, 0)).scale(c * Fraction(v[a]))
    return out


def translation_act(v: Sequence, x: EuclidElement) -> EuclidElement:
    """``v * (alpha~, alpha) = (alpha~ + v(alpha), alpha)``: shifts the cocycle by a coboundary."""
    if x.degree() not in (1, None):
        raise ValueError("translation acts on degree 1 elements")
    return EuclidElement(x.alpha_tilde + contract_vector(x.metric, v, x.alpha), x.alpha, x.metric)


# -- maps into the cone ------------------------------------------------------


def tau0(alpha: DiffPoly) -> DiffPoly:
    """Exterior generator ``th[a]`` to jet variable ``th[a,0]``: the identity on representations."""
    _require_exterior(alpha)
    return alpha


def metric_euler(eta: Metric, u: DiffPoly) -> DiffPoly:
    """``eta_ab t[a,0] d/dth[b,0] u``."""
    ctx = u.ctx
    out = ctx.zero()
    for b in range(eta.dim):
        du = partial_id(u, True, var_id(b + 1, 0))
        if not du:
            continue
        for a in range(eta.dim):
            c = eta.lower[a][b]
            if c:
                out = out + (ctx.t(a + 1, 0) * du).scale(c)
    return out


def tau(x: EuclidElement) -> ConeElement:
    """``tau0(a~) + (eta_ab t^a d^b - 1/2 eps p) tau0(a)``."""
    eta = x.metric
    p = x.degree() or 0
    a = tau0(x.alpha)
    body = tau0(x.alpha_tilde) + metric_euler(eta, a)
    return ConeElement(body, a.scale(Fraction(-p, 2)))


def sigma(x: EuclidElement) -> LocalFunctional:
    return LocalFunctional(tau(x).body)


# -- operators d, d0 and the twisted differentials on the cone -------------------


def d_op(eta: Metric, u: DiffPoly) -> DiffPoly:
    """``d = sum eta^ab th[a,k+1] d/dt[b,k]``."""
    return theta_shift_operator(eta, u, 1)


def d0_op(eta: Metric, u: DiffPoly) -> DiffPoly:
    """``d0 = sum eta^ab th[a,k] d/dt[b,k]``."""
    return theta_shift_operator(eta, u, 0)


def d_cone(eta: Metric, z: ConeElement) -> ConeElement:
    """``d`` on the cone; as an odd operator it anticommutes with ``eps``."""
    return ConeElement(d_op(eta, z.body), -d_op(eta, z.tilde))


def d_eta_cone(eta: Metric, z: ConeElement) -> ConeElement:
    """``[1/2 eta^ab th_a th_{1,b}, z]`` in the cone."""
    return cone_bracket(ConeElement.of(hydrodynamic_density(eta, z.ctx)), z)


def d_eta_jet(eta: Metric, u: DiffPoly) -> DiffPoly:
    """``-d u + 1/2 d/dx d0 u`` on the jet algebra."""
    return -d_op(eta, u) + total_derivative(d0_op(eta, u)).scale(Fraction(1, 2))


def twisted_cone_diff(eta: Metric, z: ConeElement) -> ConeElement:
    """``D + d_eta``."""
    return cone_diff(z) + d_eta_cone(eta, z)


def T_map(z: ConeElement, eta: Metric) -> ConeElement:
    """``T = 1 + 1/2 eps d0``: ``u + eps u~ -> u + eps (u~ + 1/2 d0 u)``."""
    return ConeElement(z.body, z.tilde + d0_op(eta, z.body).scale(Fraction(1, 2)))


def untwisted_cone_diff(eta: Metric, z: ConeElement) -> ConeElement:
    """``D - d``."""
    return cone_diff(z) - d_cone(eta, z)


# -- basis helpers ------------------------------------------------------------------


def exterior_basis(ctx: JetContext, degree: int) -> List[DiffPoly]:
    n = ctx.odd_count
    out = []
    for combo in combinations(range(1, n + 1), degree):
        m = ctx.one()
        for a in combo:
            m = m * ctx.th(a, 0)
        out.append(m)
    return out


def exterior_from_coeffs(ctx: JetContext, degree: int, coeffs: Sequence) -> DiffPoly:
    out = ctx.zero()
    for c, b in zip(coeffs, exterior_basis(ctx, degree)):
        if c:
            out = out + b.scale(Fraction(c))
    return out
