"""Hamiltonian operators, their bivectors, lifts to the cone, and the
Dubrovin-Novikov first-order family.

Operators act on a single line ``x`` with ``m`` even fields ``t[a]`` and
dual odd fields ``th[a]``.  A skew-adjoint matrix operator ``D`` gives the
bivector ``int sum th[a,0] D^ab_k th[b,k] dx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Tuple

from .algebra import DiffPoly, JetContext, Verdict, partial_id, schouten_degree, var_id
from .brackets import ConeElement, LocalFunctional, cone_bracket, cone_diff, lambda_bracket, schouten_local
from .linalg import inverse
from .varcalc import NotExact, exactness_witness, invert_total_derivative, total_derivative, total_derivative_n


class NotHamiltonian(ValueError):
    pass


# -- operators ---------------------------------------------------------------


@dataclass(frozen=True)
class DiffOperatorMatrix:
    """``D^ab = sum_k D^ab_k d^k``; ``terms`` maps ``(a, b, k)`` to ``D^ab_k``.

    Indices ``a, b`` run over ``1..m``.
    """

    ctx: JetContext
    terms: Mapping[Tuple[int, int, int], DiffPoly]

    def __post_init__(self):
        m = self.ctx.even_count
        clean = {}
        for (a, b, k), c in self.terms.items():
            if not (1 <= a <= m and 1 <= b <= m and k >= 0):
                raise ValueError(f"bad operator index {(a, b, k)}")
            if not isinstance(c, DiffPoly):
                c = self.ctx.const(c)
            if c.ctx != self.ctx:
                raise ValueError("operator coefficient context mismatch")
            if c:
                clean[a, b, k] = clean[a, b, k] + c if (a, b, k) in clean else c
        object.__setattr__(self, "terms", clean)

    @property
    def size(self) -> int:
        return self.ctx.even_count

    def order(self) -> int:
        return max((k for (_, _, k) in self.terms), default=0)

    def apply(self, a: int, b: int, u: DiffPoly) -> DiffPoly:
        """``D^ab u`` for a polynomial ``u`` in the same context."""
        out = u.ctx.zero()
        for (i, j, k), c in self.terms.items():
            if (i, j) == (a, b):
                out = out + c.in_context(u.ctx) * total_derivative_n(u, k)
        return out

    def adjoint_apply(self, a: int, b: int, u: DiffPoly) -> DiffPoly:
        """``(D*)^ab u = sum_k (-d)^k (D^ba_k u)``."""
        out = u.ctx.zero()
        for (i, j, k), c in self.terms.items():
            if (i, j) == (b, a):
                piece = total_derivative_n(c.in_context(u.ctx) * u, k)
                out = out - piece if k % 2 else out + piece
        return out


def check_skew_adjoint(D: DiffOperatorMatrix) -> Verdict:
    """``D + D* = 0``, tested on a fresh even field ``t[m+1]``."""
    ctx = D.ctx
    big = JetContext(ctx.even_count + 1, ctx.odd_count)
    u = big.t(ctx.even_count + 1)
    for a in range(1, D.size + 1):
        for b in range(1, D.size + 1):
            r = D.apply(a, b, u) + D.adjoint_apply(a, b, u)
            if r:
                return Verdict(False, {"a": a, "b": b, "residual": r})
    return Verdict(True)


def bivector_density(D: DiffOperatorMatrix) -> DiffPoly:
    """``sum th[a,0] D^ab_k th[b,k]`` emitted verbatim."""
    ctx = D.ctx
    out = ctx.zero()
    for (a, b, k), c in D.terms.items():
        out = out + ctx.th(a, 0) * c * ctx.th(b, k)
    return out


def operator_to_bivector(D: DiffOperatorMatrix) -> LocalFunctional:
    if not D.ctx.is_omega:
        raise ValueError("operators need an Omega X context")
    verdict = check_skew_adjoint(D)
    if not verdict:
        raise ValueError(f"operator is not skew-adjoint: {verdict.witness}")
    return LocalFunctional(bivector_density(D))


def is_hamiltonian(Q) -> Verdict:
    """``[[Q,Q]] = 0`` in local functionals; witness is a nonzero variational derivative."""
    q = Q.rep if isinstance(Q, LocalFunctional) else Q
    if q and schouten_degree(q) != 1:
        raise ValueError(f"a Hamiltonian operator has degree 1, got {schouten_degree(q)}")
    w = exactness_witness(schouten_local(q, q).rep)
    return Verdict(w is None, w)


def delta_Q(Q: LocalFunctional, u) -> LocalFunctional:
    """``[[Q, u]]``, the differential induced by a Hamiltonian operator."""
    if not is_hamiltonian(Q):
        raise NotHamiltonian("delta_Q needs a Hamiltonian operator")
    return schouten_local(Q, u)


# -- metrics and hydrodynamic operators ----------------------------------------


@dataclass(frozen=True)
class Metric:
    """Constant symmetric invertible ``eta^ab`` with cached inverse ``eta_ab``."""

    upper: Tuple[Tuple[Fraction, ...], ...]
    lower: Tuple[Tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.upper)
        m = len(rows)
        if m == 0 or any(len(r) != m for r in rows):
            raise ValueError("metric must be a nonempty square matrix")
        if any(rows[a][b] != rows[b][a] for a in range(m) for b in range(m)):
            raise ValueError("metric must be symmetric")
        try:
            low = inverse(rows)
        except ValueError:
            raise ValueError("metric must be invertible") from None
        object.__setattr__(self, "upper", rows)
        object.__setattr__(self, "lower", tuple(tuple(r) for r in low))

    @classmethod
    def identity(cls, m: int) -> "Metric":
        return cls(tuple(tuple(Fraction(int(a == b)) for b in range(m)) for a in range(m)))

    @property
    def dim(self) -> int:
        return len(self.upper)

    def context(self) -> JetContext:
        return JetContext.omega(self.dim)


def hydrodynamic_density(eta: Metric, ctx: Optional[JetContext] = None) -> DiffPoly:
    """``1/2 eta^ab th[a,0] th[b,1]``."""
    ctx = ctx or eta.context()
    out = ctx.zero()
    for a in range(eta.dim):
        for b in range(eta.dim):
            c = eta.upper[a][b]
            if c:
                out = out + (ctx.th(a + 1, 0) * ctx.th(b + 1, 1)).scale(c / 2)
    return out


def hydrodynamic_operator(eta: Metric) -> LocalFunctional:
    return LocalFunctional(hydrodynamic_density(eta))


def hydrodynamic_lift(eta: Metric) -> ConeElement:
    return ConeElement.of(hydrodynamic_density(eta))


def hydrodynamic_matrix(eta: Metric) -> DiffOperatorMatrix:
    ctx = eta.context()
    return DiffOperatorMatrix(
        ctx, {(a + 1, b + 1, 1): ctx.const(eta.upper[a][b]) for a in range(eta.dim) for b in range(eta.dim)}
    )


def theta_shift_operator(eta: Metric, u: DiffPoly, shift: int) -> DiffPoly:
    """``sum eta^ab th[a,k+shift] d/dt[b,k] u``, an odd derivation."""
    ctx = u.ctx
    out = ctx.zero()
    top = u.max_order()
    for b in range(1, eta.dim + 1):
        for k in range(top + 1):
            du = partial_id(u, False, var_id(b, k))
            if not du:
                continue
            for a in range(1, eta.dim + 1):
                c = eta.upper[a - 1][b - 1]
                if c:
                    out = out + (ctx.th(a, k + shift) * du).scale(c)
    return out


def d_eta_functional(eta: Metric, u) -> LocalFunctional:
    """``d_eta int u = -sum eta^ab int th[a,k+1] d/dt[b,k] u``."""
    rep = u.rep if isinstance(u, LocalFunctional) else u
    return LocalFunctional(-theta_shift_operator(eta, rep, 1))


# -- lifts -------------------------------------------------------------------


def maurer_cartan_residual(L: ConeElement) -> ConeElement:
    """``D L + 1/2 [L, L]``."""
    return cone_diff(L) + cone_bracket(L, L).scale(Fraction(1, 2))


def check_lift(Q, L: ConeElement) -> Verdict:
    """``int L = Q`` and the strict Maurer-Cartan equation in the cone."""
    q = Q.rep if isinstance(Q, LocalFunctional) else Q
    w = exactness_witness(L.body - q)
    if w is not None:
        return Verdict(False, {"condition": "integral", "detail": w})
    r = maurer_cartan_residual(L)
    if not r.is_zero():
        return Verdict(False, {"condition": "maurer_cartan", "body": r.body, "tilde": r.tilde})
    return Verdict(True)


class LiftError(ArithmeticError):
    pass


def compute_lift(u: DiffPoly) -> ConeElement:
    """Solve ``d u~ = -1/2 [u,u]``; then confirm ``[u, u~] = 0`` modulo constants."""
    half = lambda_bracket(u, u).scale(Fraction(-1, 2))
    try:
        tilde = invert_total_derivative(half)
    except NotExact as exc:
        raise LiftError(f"no lift: {exc.witness}") from exc
    residual = lambda_bracket(u, tilde).without_constant()
    if residual:
        raise LiftError(f"[u, u~] does not vanish: {residual}")
    return ConeElement(u, tilde)


# -- KdV ---------------------------------------------------------------------


def kdv_operator() -> DiffOperatorMatrix:
    """The skew-adjoint form ``1/8 d^3 + t d + 1/2 t_1``."""
    ctx = JetContext.omega(1)
    return DiffOperatorMatrix(
        ctx,
        {
            (1, 1, 3): ctx.const(Fraction(1, 8)),
            (1, 1, 1): ctx.t(1, 0),
            (1, 1, 0): ctx.t(1, 1).scale(Fraction(1, 2)),
        },
    )


def kdv_density() -> DiffPoly:
    """``1/8 th th_3 + t th th_1``, from ``1/8 d^3 + t d``."""
    ctx = JetContext.omega(1)
    plain = DiffOperatorMatrix(ctx, {(1, 1, 3): ctx.const(Fraction(1, 8)), (1, 1, 1): ctx.t(1, 0)})
    q = bivector_density(plain)
    assert LocalFunctional(q) == operator_to_bivector(kdv_operator())
    return q


def kdv_bivector() -> LocalFunctional:
    return LocalFunctional(kdv_density())


def kdv_lift_family(a, tilde_coeff=Fraction(-1, 8)) -> ConeElement:
    """``1/8 th th_3 + t th th_1 + a d(th th_2) + eps c th th_1 th_2``.

    The Maurer-Cartan equation forces ``c = -1/8`` for every ``a``; other
    values of ``tilde_coeff`` are accepted so that failures can be shown.
    """
    ctx = JetContext.omega(1)
    th = ctx.th
    body = kdv_density() + total_derivative(th(1, 0) * th(1, 2)).scale(a)
    tilde = (th(1, 0) * th(1, 1) * th(1, 2)).scale(tilde_coeff)
    return ConeElement(body, tilde)


# -- Dubrovin-Novikov family -------------------------------------------------------


@dataclass(frozen=True)
class DNSpec:
    """``eta^ab d + A^ab_c t[c] + B^ab`` with ``A`` and ``B`` skew in ``(a, b)``.

    ``A`` maps ``(a, b, c)`` to a rational; ``B`` is an ``m x m`` matrix.
    Indices are 1-based.
    """

    eta: Metric
    A: Mapping[Tuple[int, int, int], Fraction]
    B: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        m = self.eta.dim
        A = {}
        for (a, b, c), val in self.A.items():
            if not all(1 <= i <= m for i in (a, b, c)):
                raise ValueError(f"A index out of range: {(a, b, c)}")
            val = Fraction(val)
            if val:
                A[a, b, c] = val
        for (a, b, c), val in A.items():
            if A.get((b, a, c), 0) != -val:
                raise ValueError(f"A must be skew in its upper indices at {(a, b, c)}")
        B = tuple(tuple(Fraction(x) for x in row) for row in self.B)
        if len(B) != m or any(len(r) != m for r in B):
            raise ValueError("B must be m x m")
        if any(B[a][b] != -B[b][a] for a in range(m) for b in range(m)):
            raise ValueError("B must be skew")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.eta.dim

    def a(self, i: int, j: int, k: int) -> Fraction:
        return self.A.get((i, j, k), Fraction(0))

    def operator(self) -> DiffOperatorMatrix:
        ctx = self.eta.context()
        m = self.dim
        terms = {}
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                if self.eta.upper[i - 1][j - 1]:
                    terms[i, j, 1] = ctx.const(self.eta.upper[i - 1][j - 1])
                zeroth = ctx.const(self.B[i - 1][j - 1])
                for k in range(1, m + 1):
                    if self.a(i, j, k):
                        zeroth = zeroth + ctx.t(k).scale(self.a(i, j, k))
                if zeroth:
                    terms[i, j, 0] = zeroth
        return DiffOperatorMatrix(ctx, terms)


def _first_failure(cases: Iterable[Tuple[tuple, Fraction]]) -> Optional[dict]:
    for idx, val in cases:
        if val:
            return {"indices": list(idx), "residual": val}
    return None


def dn_jacobi(spec: DNSpec) -> Verdict:
    """``[e^a,e^b] = A^ab_c e^c`` satisfies Jacobi."""
    m, A = spec.dim, spec.a
    r = range(1, m + 1)

    def cases():
        for a in r:
            for b in r:
                for d in r:
                    for e in r:
                        s = sum(
                            A(x, y, c) * A(c, z, e)
                            for (x, y, z) in ((a, b, d), (b, d, a), (d, a, b))
                            for c in r
                        )
                        yield (a, b, d, e), s

    w = _first_failure(cases())
    return Verdict(w is None, w)


def dn_killing(spec: DNSpec) -> Verdict:
    """``eta`` is ad-invariant: ``A^ab_c eta^cd + eta^bc A^ad_c = 0``."""
    m, A, eta = spec.dim, spec.a, spec.eta.upper
    r = range(1, m + 1)

    def cases():
        for a in r:
            for b in r:
                for d in r:
                    s = sum(A(a, b, c) * eta[c - 1][d - 1] + eta[b - 1][c - 1] * A(a, d, c) for c in r)
                    yield (a, b, d), s

    w = _first_failure(cases())
    return Verdict(w is None, w)


def dn_cocycle(spec: DNSpec) -> Verdict:
    """``B`` is a 2-cocycle: the cyclic sum of ``A^ab_c B^cd`` vanishes."""
    m, A, B = spec.dim, spec.a, spec.B
    r = range(1, m + 1)

    def cases():
        for a in r:
            for b in r:
                for d in r:
                    s = sum(
                        A(x, y, c) * B[c - 1][z - 1]
                        for (x, y, z) in ((a, b, d), (b, d, a), (d, a, b))
                        for c in r
                    )
                    yield (a, b, d), s

    w = _first_failure(cases())
    return Verdict(w is None, w)


@dataclass(frozen=True)
class DNReport:
    jacobi: Verdict
    killing: Verdict
    cocycle: Verdict
    direct: Verdict

    @property
    def consistent(self) -> bool:
        return bool(self.jacobi and self.killing and self.cocycle) == bool(self.direct)

    @property
    def ok(self) -> bool:
        return bool(self.direct) and self.consistent


def dn_check(spec: DNSpec) -> DNReport:
    Q = operator_to_bivector(spec.operator())
    return DNReport(dn_jacobi(spec), dn_killing(spec), dn_cocycle(spec), is_hamiltonian(Q))
