"""Brackets on jet algebras, local functionals and the cone.

Sign conventions: ``|u|`` is parity (theta count mod 2) in the
Soloviev brackets and the Schouten degree (theta count minus one) in the
Omega X brackets.  With left odd derivatives, the Soloviev bracket of the
Omega X tensor coincides term by term with :func:`lambda_bracket`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Tuple, Union

from .algebra import (
    DiffPoly,
    JetContext,
    PoissonTensor,
    check_same_context,
    omega_tensor,
    partial_id,
    schouten_degree,
    var_id,
)
from .varcalc import euler, exact_verdict, is_exact, total_derivative, total_derivative_n


def _ddx_powers(p: DiffPoly, n: int) -> List[DiffPoly]:
    out = [p]
    for _ in range(n):
        out.append(total_derivative(out[-1]) if out[-1] else out[-1])
    return out


def _horner(ctx: JetContext, by_shift: Dict[int, DiffPoly]) -> DiffPoly:
    """``sum_s d^s W_s`` with one total derivative per level."""
    if not by_shift:
        return ctx.zero()
    acc = ctx.zero()
    for s in range(max(by_shift), -1, -1):
        if acc:
            acc = total_derivative(acc)
        w = by_shift.get(s)
        if w:
            acc = acc + w
    return acc


def _coord_kind(P: PoissonTensor, a: int) -> Tuple[bool, int]:
    x = P.coordinate(a)
    return x.odd, x.index


# -- Soloviev brackets -----------------------------------------------------


def soloviev(P: PoissonTensor, u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """Soloviev's bracket built from higher Euler operators.

    ``{u,v} = -sum (-1)^((|b|+nu)|u|) d^(k+l) (P^ab E_{k,a}u E_{l,b}v)``.
    """
    ctx = check_same_context(u, v)
    if P.ctx != ctx:
        raise ValueError("tensor context mismatch")
    if not u or not v:
        return ctx.zero()
    pu = u.parity()
    ou, ov = u.max_order(), v.max_order()
    eu: Dict[Tuple[int, int], DiffPoly] = {}
    ev: Dict[Tuple[int, int], DiffPoly] = {}

    def eul(cache, w, a, k):
        key = (a, k)
        if key not in cache:
            odd, idx = _coord_kind(P, a)
            cache[key] = euler(w, ("odd" if odd else "even", idx), k)
        return cache[key]

    by_shift: Dict[int, DiffPoly] = {}
    for a, b, p in P.nonzero():
        positive = (P.coord_parity(b) + P.parity) * pu % 2 == 1
        for k in range(ou + 1):
            ea = eul(eu, u, a, k)
            if not ea:
                continue
            pe = p * ea
            for l in range(ov + 1):
                eb = eul(ev, v, b, l)
                if not eb:
                    continue
                term = pe * eb
                if not positive:
                    term = -term
                by_shift[k + l] = by_shift.get(k + l, ctx.zero()) + term
    return _horner(ctx, by_shift)


def soloviev_constant(P: PoissonTensor, u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """Soloviev's bracket for constant P, without Euler operators.

    ``{u,v} = -sum (-1)^((|b|+nu)|u|) P^ab (d^l d_{k,a} u)(d^k d_{l,b} v)``.
    """
    ctx = check_same_context(u, v)
    if not P.is_constant():
        raise ValueError("soloviev_constant needs a constant Poisson tensor")
    if not u or not v:
        return ctx.zero()
    pu = u.parity()
    ou, ov = u.max_order(), v.max_order()
    du: Dict[Tuple[int, int], List[DiffPoly]] = {}
    dv: Dict[Tuple[int, int], List[DiffPoly]] = {}
    out = ctx.zero()
    for a, b, p in P.nonzero():
        c = p.constant_term()
        if (P.coord_parity(b) + P.parity) * pu % 2 == 0:
            c = -c
        oa, ia = _coord_kind(P, a)
        ob, ib = _coord_kind(P, b)
        for k in range(ou + 1):
            if (a, k) not in du:
                du[a, k] = _ddx_powers(partial_id(u, oa, var_id(ia, k)), ov)
            if not du[a, k][0]:
                continue
            for l in range(ov + 1):
                if (b, l) not in dv:
                    dv[b, l] = _ddx_powers(partial_id(v, ob, var_id(ib, l)), ou)
                left = du[a, k][l]
                right = dv[b, l][k]
                if left and right:
                    out = out + (left * right).scale(c)
    return out


# -- Omega X brackets --------------------------------------------------------


def _require_omega(ctx: JetContext) -> None:
    if not ctx.is_omega:
        raise ValueError("this bracket needs an Omega X context (n = m)")


def lambda_bracket(u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """The bracket on the jet algebra of Omega X, shifted grading.

    ``[u,v] = sum_{k,l} (-1)^|u| (d^l d^a_k u)(d^k d_{l,a} v) - (d^l d_{k,a} u)(d^k d^a_l v)``
    """
    ctx = check_same_context(u, v)
    _require_omega(ctx)
    if not u or not v:
        return ctx.zero()
    sign = -1 if schouten_degree(u) % 2 else 1
    ou, ov = u.max_order(), v.max_order()
    out = ctx.zero()
    for a in range(1, ctx.even_count + 1):
        for k in range(ou + 1):
            u_odd = partial_id(u, True, var_id(a, k))
            u_even = partial_id(u, False, var_id(a, k))
            if not u_odd and not u_even:
                continue
            u_odd_pows = _ddx_powers(u_odd, ov) if u_odd else None
            u_even_pows = _ddx_powers(u_even, ov) if u_even else None
            for l in range(ov + 1):
                if u_odd_pows is not None and u_odd_pows[l]:
                    v_even = partial_id(v, False, var_id(a, l))
                    if v_even:
                        out = out + (u_odd_pows[l] * total_derivative_n(v_even, k)).scale(sign)
                if u_even_pows is not None and u_even_pows[l]:
                    v_odd = partial_id(v, True, var_id(a, l))
                    if v_odd:
                        out = out - u_even_pows[l] * total_derivative_n(v_odd, k)
    return out


class LocalFunctional:
    """A class ``int u dx``: a representative modulo total derivatives.

    Equality is decided by exactness of the difference.
    """

    __slots__ = ("rep",)

    def __init__(self, rep: DiffPoly):
        self.rep = rep

    @property
    def ctx(self) -> JetContext:
        return self.rep.ctx

    def __eq__(self, other) -> bool:
        if isinstance(other, LocalFunctional):
            return is_exact(self.rep - other.rep)
        if isinstance(other, DiffPoly):
            return is_exact(self.rep - other)
        if other == 0:
            return is_exact(self.rep)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return is_exact(self.rep)

    def zero_verdict(self):
        return exact_verdict(self.rep)

    def __add__(self, other: "LocalFunctional") -> "LocalFunctional":
        return LocalFunctional(self.rep + _rep(other))

    def __sub__(self, other: "LocalFunctional") -> "LocalFunctional":
        return LocalFunctional(self.rep - _rep(other))

    def __neg__(self) -> "LocalFunctional":
        return LocalFunctional(-self.rep)

    def scale(self, c) -> "LocalFunctional":
        return LocalFunctional(self.rep.scale(c))

    def __mul__(self, c) -> "LocalFunctional":
        return self.scale(c)

    __rmul__ = __mul__

    def degree(self) -> int:
        return schouten_degree(self.rep)

    def normal_form(self) -> DiffPoly:
        """A display representative; carries no semantic weight."""
        return display_normal_form(self.rep)

    def __repr__(self) -> str:
        return f"LocalFunctional({str(self.rep)!r})"


def _rep(x: Union[LocalFunctional, DiffPoly]) -> DiffPoly:
    return x.rep if isinstance(x, LocalFunctional) else x


def display_normal_form(u: DiffPoly) -> DiffPoly:
    """Integrate by parts while that strictly lowers a term's top jet order.

    A term ``c * x[K]`` whose top variable occurs once, with ``c`` of jet
    order below ``K-1``, is replaced by ``-(d c) * x[K-1]``.
    """
    from .algebra import partial

    changed = True
    while changed:
        changed = False
        for mono, coef in sorted(u.terms.items(), key=lambda t: repr(t[0])):
            term = DiffPoly._raw(u.ctx, {mono: coef})
            top = term.max_order()
            if top < 1:
                continue
            tops = [x for x in term.variables() if x.order == top]
            if len(tops) != 1:
                continue
            x = tops[0]
            c = partial(term, x)
            if partial(c, x) or c.max_order() >= top - 1:
                continue
            low = u.ctx.var(x.shifted(-1))
            # term == x*c for odd x and c*x for even x; both are d(low*c) - low*dc
            replacement = -(low * total_derivative(c))
            u = u - term + replacement
            changed = True
            break
    return u


def variational_pair(u: DiffPoly, a: int) -> Tuple[DiffPoly, DiffPoly]:
    return euler(u, ("odd", a), 0), euler(u, ("even", a), 0)


def schouten_local(U, V) -> LocalFunctional:
    """Variational Schouten bracket ``int (-1)^|u| E^a u E_a v - E_a u E^a v dx``."""
    u, v = _rep(U), _rep(V)
    ctx = check_same_context(u, v)
    _require_omega(ctx)
    if not u or not v:
        return LocalFunctional(ctx.zero())
    sign = -1 if schouten_degree(u) % 2 else 1
    out = ctx.zero()
    for a in range(1, ctx.even_count + 1):
        u_odd, u_even = variational_pair(u, a)
        v_odd, v_even = variational_pair(v, a)
        if u_odd and v_even:
            out = out + (u_odd * v_even).scale(sign)
        if u_even and v_odd:
            out = out - u_even * v_odd
    return LocalFunctional(out)


# -- the alpha form ------------------------------------------------------------


def alpha_form(u: DiffPoly, v: DiffPoly, w: DiffPoly, P: PoissonTensor) -> DiffPoly:
    """The trilinear form splitting the Jacobiator of Soloviev's bracket.

    ``{{u,v},w} = alpha(u|v,w) - (-1)^((|u|+nu)(|v|+nu)) alpha(v|u,w)``, where
    ``alpha(u|v,w)`` collects the terms in which the outer derivative lands
    on ``u``.  The overall sign is ``+(-1)^e``; the derivation from the
    constant-coefficient bracket fixes it.
    """
    ctx = check_same_context(u, v, w)
    if not P.is_constant():
        raise ValueError("alpha_form needs a constant Poisson tensor")
    if not u or not v or not w:
        return ctx.zero()
    nu = P.parity
    pu, pv = u.parity(), v.parity()
    ou, ov, ow = u.max_order(), v.max_order(), w.max_order()
    par = P.coord_parity
    pairs = [(a, b, p.constant_term()) for a, b, p in P.nonzero()]
    dv_cache: Dict[Tuple[int, int], List[DiffPoly]] = {}
    dw_cache: Dict[Tuple[int, int], List[DiffPoly]] = {}
    du_cache: Dict[Tuple[int, int, int, int], List[DiffPoly]] = {}

    def dv(b, j, n):
        key = (b, j)
        if key not in dv_cache:
            odd, idx = _coord_kind(P, b)
            dv_cache[key] = _ddx_powers(partial_id(v, odd, var_id(idx, j)), ou + ow)
        return dv_cache[key][n]

    def dw(d, l, n):
        key = (d, l)
        if key not in dw_cache:
            odd, idx = _coord_kind(P, d)
            dw_cache[key] = _ddx_powers(partial_id(w, odd, var_id(idx, l)), ou + ov)
        return dw_cache[key][n]

    def du(c, k, a, i, n):
        key = (c, k, a, i)
        if key not in du_cache:
            oa, ia = _coord_kind(P, a)
            oc, ic = _coord_kind(P, c)
            inner = partial_id(partial_id(u, oa, var_id(ia, i)), oc, var_id(ic, k))
            du_cache[key] = _ddx_powers(inner, ov + ow)
        return du_cache[key][n]

    out = ctx.zero()
    for a, b, pab in pairs:
        for c, d, pcd in pairs:
            e = par(b) * pu + par(d) * pu + (par(d) + nu) * (pv + nu) + (par(a) + par(b) + nu) * par(c)
            coef = -(pab * pcd) if e % 2 else pab * pcd
            for i in range(ou + 1):
                for k in range(ou + 1):
                    if not du(c, k, a, i, 0):
                        continue
                    for j in range(ov + 1):
                        if not dv(b, j, 0):
                            continue
                        for l in range(ow + 1):
                            if not dw(d, l, 0):
                                continue
                            for p in range(j + 1):
                                for q in range(l + 1):
                                    f1 = du(c, k, a, i, j + l - p - q)
                                    f2 = dv(b, j, i + q)
                                    f3 = dw(d, l, k + p)
                                    if f1 and f2 and f3:
                                        out = out + (f1 * f2 * f3).scale(coef * comb(j, p) * comb(l, q))
    return out


# -- the cone ------------------------------------------------------------------


@dataclass(frozen=True)
class ConeElement:
    """``body + eps * tilde`` in the cone of ``d : Lambda~ -> Lambda``.

    ``tilde`` is taken modulo constants and stored without a constant term.
    """

    body: DiffPoly
    tilde: DiffPoly

    def __post_init__(self):
        check_same_context(self.body, self.tilde)
        object.__setattr__(self, "tilde", self.tilde.without_constant())

    @classmethod
    def of(cls, body: DiffPoly, tilde: Optional[DiffPoly] = None) -> "ConeElement":
        return cls(body, tilde if tilde is not None else body.ctx.zero())

    @property
    def ctx(self) -> JetContext:
        return self.body.ctx

    def degree(self) -> Optional[int]:
        degs = set()
        if self.body:
            degs.add(self.body.theta_degree() - 1)
        if self.tilde:
            degs.add(self.tilde.theta_degree() - 2)
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous cone element, degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def is_zero(self) -> bool:
        return not self.body and not self.tilde

    def __add__(self, other: "ConeElement") -> "ConeElement":
        return ConeElement(self.body + other.body, self.tilde + other.tilde)

    def __sub__(self, other: "ConeElement") -> "ConeElement":
        return ConeElement(self.body - other.body, self.tilde - other.tilde)

    def __neg__(self) -> "ConeElement":
        return ConeElement(-self.body, -self.tilde)

    def scale(self, c) -> "ConeElement":
        return ConeElement(self.body.scale(c), self.tilde.scale(c))

    def __mul__(self, c) -> "ConeElement":
        return self.scale(c)

    __rmul__ = __mul__


def cone_bracket(x: ConeElement, y: ConeElement) -> ConeElement:
    """``[u + eps u~, v + eps v~] = [u,v] + eps([u~,v] + (-1)^|u| [u,v~])``."""
    ctx = x.ctx
    if x.is_zero() or y.is_zero():
        return ConeElement.of(ctx.zero())
    p = x.degree()
    body = lambda_bracket(x.body, y.body)
    tilde = lambda_bracket(x.tilde, y.body)
    if x.body and y.tilde:
        cross = lambda_bracket(x.body, y.tilde)
        tilde = tilde - cross if p % 2 else tilde + cross
    return ConeElement(body, tilde)


def cone_diff(x: ConeElement) -> ConeElement:
    """``D(u + eps u~) = d u~``."""
    return ConeElement.of(total_derivative(x.tilde))


def integrate(x: ConeElement) -> LocalFunctional:
    return LocalFunctional(x.body)


def soloviev_omega(u: DiffPoly, v: DiffPoly) -> DiffPoly:
    """Soloviev's bracket for the Omega X tensor; equals :func:`lambda_bracket`."""
    return soloviev(omega_tensor(u.ctx), u, v)
