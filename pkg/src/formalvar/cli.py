"""Command-line front end: every engine operation behind a JSON report.

Each command prints ``{"ok": ..., "result": ..., "witness": ...}`` with
sorted keys.  Exit status is 0 on success, 1 when the mathematics says no
(the witness explains why) and 2 when the input cannot be understood.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .algebra import DiffPoly, JetContext, PoissonTensor, Verdict, omega_tensor, poisson_bracket_finite, schouten_finite
from .brackets import ConeElement, LocalFunctional, lambda_bracket, schouten_local, soloviev
from .exprparse import ParseError, format_coeff, format_poly, parse_ast, evaluate, variables_of
from .varcalc import NotExact, euler, invert_total_derivative, total_derivative


class InputError(ValueError):
    """Malformed input; maps to exit status 2."""


class MathFailure(Exception):
    """A well-posed question with a negative answer; maps to exit status 1."""

    def __init__(self, witness, result=None, extra=None):
        super().__init__(str(witness))
        self.witness = witness
        self.result = result
        self.extra = extra or {}


# -- serialization -------------------------------------------------------------


def to_json(obj: Any) -> Any:
    """Recursively turn engine values into JSON-ready data."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_coeff(obj)
    if isinstance(obj, DiffPoly):
        return format_poly(obj)
    if isinstance(obj, LocalFunctional):
        return {"representative": format_poly(obj.rep), "normal_form": format_poly(obj.normal_form())}
    if isinstance(obj, ConeElement):
        return {"body": format_poly(obj.body), "tilde": format_poly(obj.tilde)}
    if isinstance(obj, Verdict):
        out = {"ok": obj.ok}
        if obj.witness is not None:
            out["witness"] = to_json(obj.witness)
        return out
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    from .euclid import EuclidElement

    if isinstance(obj, EuclidElement):
        return {"alpha_tilde": format_poly(obj.alpha_tilde), "alpha": format_poly(obj.alpha)}
    return str(obj)


def _pretty(report: Dict[str, Any], indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key in sorted(report):
        val = report[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_pretty(val, indent + 1))
        elif isinstance(val, list) and any(isinstance(v, (dict, list)) for v in val):
            lines.append(f"{pad}{key}:")
            for i, v in enumerate(val):
                if isinstance(v, dict):
                    lines.append(f"{pad}  [{i}]")
                    lines.append(_pretty(v, indent + 2))
                else:
                    lines.append(f"{pad}  [{i}] {json.dumps(v)}")
        else:
            lines.append(f"{pad}{key}: {val if isinstance(val, str) else json.dumps(val)}")
    return "\n".join(line for line in lines if line)


def emit(report: Dict[str, Any], pretty: bool, stream=None) -> None:
    stream = stream or sys.stdout
    data = to_json(report)
    if pretty:
        stream.write(_pretty(data) + "\n")
    else:
        stream.write(json.dumps(data, sort_keys=True) + "\n")


# -- input handling --------------------------------------------------------------


def parse_context(text: Optional[str]) -> Optional[JetContext]:
    if text is None:
        return None
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"--context expects m,n or m, got {text!r}") from None
    if len(parts) == 1:
        parts.append(parts[0])
    if len(parts) != 2:
        raise InputError(f"--context expects m,n, got {text!r}")
    try:
        return JetContext(*parts)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def read_text(args) -> str:
    if getattr(args, "file", None):
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    return sys.stdin.read()


def expressions(args, count: int) -> List[str]:
    """Positional expressions, else non-empty lines of the file or stdin."""
    given = list(getattr(args, "expr", None) or [])
    if not given:
        given = [line.strip() for line in read_text(args).splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if len(given) != count:
        raise InputError(f"expected {count} expression(s), got {len(given)}")
    return given


def parse_many(texts: Sequence[str], ctx: Optional[JetContext]) -> List[DiffPoly]:
    """Parse into one shared context: the given one, or the smallest Omega X fitting all."""
    nodes = [parse_ast(t) for t in texts]
    if ctx is None:
        m = max([v.index for n in nodes for v in variables_of(n)] + [1])
        ctx = JetContext.omega(m)
    return [evaluate(n, ctx) for n in nodes]


def load_json(args) -> Any:
    text = read_text(args)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None


def _rational(x) -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {x!r}") from None


def _matrix(rows, what: str) -> List[List[Fraction]]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{what} must be a list of rows")
    return [[_rational(x) for x in r] for r in rows]


def _metric(rows):
    from .hamiltonian import Metric

    try:
        return Metric(_matrix(rows, "eta"))
    except InputError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise InputError(f"bad metric: {exc}") from None


def _expr(text, ctx: JetContext) -> DiffPoly:
    if not isinstance(text, str):
        text = str(text)
    return evaluate(parse_ast(text), ctx)


def _require_fields(data, *names):
    if not isinstance(data, dict):
        raise InputError("expected a JSON object")
    missing = [n for n in names if n not in data]
    if missing:
        raise InputError(f"missing field(s): {', '.join(missing)}")


# -- operator and DN inputs ----------------------------------------------------------


def operator_from_json(data, ctx: Optional[JetContext]):
    """``{context, entries: [{a, b, k, coeff}]}`` to a :class:`DiffOperatorMatrix`."""
    from .hamiltonian import DiffOperatorMatrix

    _require_fields(data, "entries")
    if "context" in data:
        ctx = parse_context(str(data["context"]))
    if ctx is None:
        m = max([int(e.get("a", 1)) for e in data["entries"]] + [int(e.get("b", 1)) for e in data["entries"]] + [1])
        ctx = JetContext.omega(m)
    terms: Dict = {}
    for e in data["entries"]:
        _require_fields(e, "a", "b", "k", "coeff")
        key = (int(e["a"]), int(e["b"]), int(e["k"]))
        c = _expr(e["coeff"], ctx)
        terms[key] = terms[key] + c if key in terms else c
    try:
        return DiffOperatorMatrix(ctx, terms)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def dnspec_from_json(data):
    from .hamiltonian import DNSpec

    _require_fields(data, "eta", "A", "B")
    eta = _metric(data["eta"])
    A: Dict = {}
    for e in data["A"]:
        _require_fields(e, "a", "b", "c", "val")
        A[int(e["a"]), int(e["b"]), int(e["c"])] = _rational(e["val"])
    try:
        return DNSpec(eta, A, tuple(tuple(r) for r in _matrix(data["B"], "B")))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _density_or_operator(args, ctx):
    """Either operator JSON or a degree-1 density expression."""
    from .hamiltonian import operator_to_bivector

    if args.expr:
        return parse_many(expressions(args, 1), ctx)[0], None
    text = read_text(args).strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc.msg}") from None
        op = operator_from_json(data, ctx)
        from .hamiltonian import check_skew_adjoint

        skew = check_skew_adjoint(op)
        if not skew:
            raise MathFailure({"condition": "skew_adjoint", "detail": skew.witness})
        return operator_to_bivector(op).rep, op
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) != 1:
        raise InputError("expected one density expression or operator JSON")
    return parse_many(lines, ctx)[0], None


# -- carriers for mc / gauge ------------------------------------------------------------


def _carrier_from_json(data, ctx_default: Optional[JetContext]):
    """Build ``(carrier, coefficient parser)`` from a carrier description."""
    from . import deligne
    from .euclid import EuclidElement

    kind = data.get("carrier", "jet")
    ctx = parse_context(str(data["context"])) if "context" in data else ctx_default
    if kind == "matrix":
        size = int(data.get("size", 0)) or None

        def coeff(v):
            mat = _matrix(v, "matrix coefficient")
            return tuple(tuple(r) for r in mat)

        sample = next((c for key in ("A", "X") for c in data.get(key, []) if c), None)
        if size is None:
            size = len(sample) if sample else 1
        return deligne.MatrixCarrier(size), coeff
    if kind == "euclid":
        _require_fields(data, "eta")
        metric = _metric(data["eta"])
        ectx = metric.context()

        def coeff(v):
            if v in (0, "0", None):
                return EuclidElement.make(metric)
            _require_fields(v, "alpha_tilde", "alpha")
            return EuclidElement(_expr(v["alpha_tilde"], ectx), _expr(v["alpha"], ectx), metric)

        base = coeff(data["base"]) if data.get("base") else None
        return deligne.EuclidCarrier(metric, base), coeff
    texts = _collect_texts(data)
    if ctx is None:
        m = max([v.index for t in texts for v in variables_of(parse_ast(t))] + [1])
        ctx = JetContext.omega(m)
    if kind in ("jet", "schouten", "local"):
        wrap = LocalFunctional if kind == "local" else (lambda u: u)

        def coeff(v):
            return wrap(_expr(v, ctx))

        base = coeff(data["base"]) if data.get("base") else None
        cls = {"jet": deligne.JetCarrier, "schouten": deligne.SchoutenCarrier, "local": deligne.LocalCarrier}[kind]
        return cls(ctx, base), coeff
    if kind == "cone":

        def coeff(v):
            if isinstance(v, dict):
                return ConeElement(_expr(v.get("body", "0"), ctx), _expr(v.get("tilde", "0"), ctx))
            return ConeElement.of(_expr(v, ctx))

        base = coeff(data["base"]) if data.get("base") else None
        return deligne.ConeCarrier(ctx, base), coeff
    raise InputError(f"unknown carrier {kind!r}")


def _collect_texts(data) -> List[str]:
    out = []

    def walk(v):
        if isinstance(v, str):
            out.append(v)
        elif isinstance(v, dict):
            for w in v.values():
                walk(w)
        elif isinstance(v, list):
            for w in v:
                walk(w)

    for key in ("base", "A", "X"):
        if key in data:
            walk(data[key])
    return [t for t in out if t.strip()]


def _truncated(carrier, coeff, values, order: int):
    from .deligne import TruncatedElement

    if not isinstance(values, list):
        raise InputError("hbar coefficients must be a list (index 0 is the hbar^1 coefficient)")
    parsed = [coeff(v) for v in values]
    for extra in parsed[order:]:
        if not carrier.is_zero(extra):
            raise InputError(f"nonzero coefficient beyond hbar^{order}")
    parsed = parsed[:order] + [carrier.zero() for _ in range(order - len(parsed))]
    return TruncatedElement(carrier, tuple(parsed))


def _series_json(x) -> List[Any]:
    return [to_json(c) for c in x.coeffs]


# -- commands ------------------------------------------------------------------------------


def cmd_ddx(args, ctx):
    (u,) = parse_many(expressions(args, 1), ctx)
    return {"ok": True, "result": total_derivative(u)}


def _witness_text(w: dict) -> str:
    if "constant" in w:
        return f"constant = {format_coeff(w['constant'])}"
    if "euler_0" in w:
        return f"euler_0 = {format_poly(w['euler_0'])}"
    return json.dumps(to_json(w), sort_keys=True)


def cmd_antiddx(args, ctx):
    (u,) = parse_many(expressions(args, 1), ctx)
    try:
        v = invert_total_derivative(u)
    except NotExact as exc:
        w = exc.witness
        extra = {}
        if "kind" in w:
            extra["variable"] = f"{'th' if w['kind'] == 'odd' else 't'}{w['index']}"
        raise MathFailure(_witness_text(w), extra=extra) from None
    return {"ok": True, "result": v}


def _variable_spec(text: str):
    text = text.strip()
    if text.startswith("th"):
        kind, rest = "odd", text[2:]
    elif text.startswith("t"):
        kind, rest = "even", text[1:]
    else:
        kind, rest = "even", text
    try:
        return kind, int(rest)
    except ValueError:
        raise InputError(f"-a expects t<a>, th<a> or an index, got {text!r}") from None


def cmd_euler(args, ctx):
    (u,) = parse_many(expressions(args, 1), ctx)
    kind, a = _variable_spec(args.a)
    if args.odd:
        kind = "odd"
    bound = u.ctx.odd_count if kind == "odd" else u.ctx.even_count
    if not 1 <= a <= bound:
        raise InputError(f"variable index {a} outside context ({u.ctx.even_count},{u.ctx.odd_count})")
    if args.k < 0:
        raise InputError("-k must be non-negative")
    return {"ok": True, "result": euler(u, (kind, a), args.k)}


def _tensor_from_file(path: str, ctx: Optional[JetContext]):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid tensor JSON: {exc.msg}") from None
    _require_fields(data, "rows")
    if "context" in data:
        ctx = parse_context(str(data["context"]))
    if ctx is None:
        raise InputError("tensor JSON needs a context")
    rows = [[_expr(x, ctx) for x in r] for r in data["rows"]]
    try:
        return PoissonTensor.from_rows(ctx, int(data.get("parity", 1)), rows)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_bracket(args, ctx):
    if args.tensor:
        P = _tensor_from_file(args.tensor, ctx)
        ctx = P.ctx
    u, v = parse_many(expressions(args, 2), ctx)
    kind = args.kind
    if kind == "schouten":
        return {"ok": True, "result": schouten_local(u, v)}
    if kind == "lambda":
        return {"ok": True, "result": lambda_bracket(u, v)}
    if kind == "finite":
        if args.tensor:
            return {"ok": True, "result": poisson_bracket_finite(P, u, v)}
        return {"ok": True, "result": schouten_finite(u, v)}
    if kind == "soloviev":
        tensor = P if args.tensor else omega_tensor(u.ctx)
        return {"ok": True, "result": soloviev(tensor, u, v)}
    raise InputError(f"unknown bracket kind {kind!r}")


def cmd_is_hamiltonian(args, ctx):
    from .hamiltonian import is_hamiltonian

    q, _ = _density_or_operator(args, ctx)
    verdict = is_hamiltonian(q)
    result = {"density": q, "class": LocalFunctional(q)}
    if not verdict:
        raise MathFailure(verdict.witness, result=result)
    return {"ok": True, "result": result}


def cmd_lift(args, ctx):
    from .hamiltonian import LiftError, check_lift, compute_lift

    q, _ = _density_or_operator(args, ctx)
    if args.tilde is not None:
        L = ConeElement(q, evaluate(parse_ast(args.tilde), q.ctx))
        verdict = check_lift(q, L)
        if not verdict:
            raise MathFailure(verdict.witness, result=L)
        return {"ok": True, "result": L}
    try:
        L = compute_lift(q)
    except LiftError as exc:
        raise MathFailure(str(exc)) from None
    verdict = check_lift(q, L)
    if not verdict:
        raise MathFailure(verdict.witness, result=L)
    return {"ok": True, "result": L}


def cmd_dn_check(args, ctx):
    from .hamiltonian import dn_check

    spec = dnspec_from_json(load_json(args))
    rep = dn_check(spec)
    out = {
        "ok": rep.ok,
        "jacobi": bool(rep.jacobi),
        "killing": bool(rep.killing),
        "cocycle": bool(rep.cocycle),
        "direct": bool(rep.direct),
        "consistent": rep.consistent,
        "result": {"operator_density": operator_density(spec)},
    }
    witness = {k: getattr(rep, k).witness for k in ("jacobi", "killing", "cocycle", "direct") if not getattr(rep, k)}
    if not rep.ok:
        raise MathFailure(witness, result=out["result"], extra={k: out[k] for k in ("jacobi", "killing", "cocycle", "direct", "consistent")})
    return out


def operator_density(spec) -> DiffPoly:
    from .hamiltonian import bivector_density

    return bivector_density(spec.operator())


def cmd_mc(args, ctx):
    from .deligne import curvature

    data = load_json(args)
    _require_fields(data, "A")
    carrier, coeff = _carrier_from_json(data, ctx)
    A = _truncated(carrier, coeff, data["A"], args.order)
    Q = curvature(A)
    result = {"curvature": _series_json(Q), "order": args.order}
    if not Q.is_zero():
        k = Q.low_order()
        raise MathFailure({"hbar_power": k, "coefficient": to_json(Q.coeffs[k - 1])}, result=result)
    return {"ok": True, "result": result}


def cmd_gauge(args, ctx):
    from .deligne import curvature, exp_ad, gauge_act

    data = load_json(args)
    _require_fields(data, "A", "X")
    carrier, coeff = _carrier_from_json(data, ctx)
    A = _truncated(carrier, coeff, data["A"], args.order)
    X = _truncated(carrier, coeff, data["X"], args.order)
    B = gauge_act(X, A)
    QA, QB = curvature(A), curvature(B)
    result = {
        "A": _series_json(B),
        "curvature_before": _series_json(QA),
        "curvature_after": _series_json(QB),
        "curvature_preserved": QA == QB,
        "curvature_covariant": QB == exp_ad(X, QA),
    }
    return {"ok": True, "result": result}


def cmd_euclid_check(args, ctx):
    from .euclid import EuclidElement, mc_to_lie, translation_act
    from .hamiltonian import Metric

    data = load_json(args)
    if "eta" in data:
        metric = _metric(data["eta"])
    else:
        _require_fields(data, "n")
        metric = Metric.identity(int(data["n"]))
    ectx = metric.context()
    try:
        x = EuclidElement(_expr(data.get("alpha_tilde", "0"), ectx), _expr(data.get("alpha", "0"), ectx), metric)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise InputError(str(exc)) from None
    if x.degree() not in (1, None):
        raise InputError("euclid-check needs alpha_tilde of theta degree 2 and alpha of theta degree 3")
    if "v" in data:
        v = [_rational(c) for c in data["v"]]
        if len(v) != metric.dim:
            raise InputError("v must have n components")
        x = translation_act(v, x)
    rep = mc_to_lie(x)
    result = {
        "element": x,
        "structure": rep.structure,
        "cocycle": rep.cocycle,
        "jacobi": bool(rep.jacobi),
        "cocycle_ok": bool(rep.cocycle_ok),
        "maurer_cartan": bool(rep.maurer_cartan),
        "consistent": rep.consistent,
    }
    if not (rep.maurer_cartan and rep.consistent):
        w = {k: getattr(rep, k).witness for k in ("maurer_cartan", "jacobi", "cocycle_ok") if not getattr(rep, k)}
        raise MathFailure(w, result=result)
    return {"ok": True, "result": result}


def cmd_selftest(args, ctx):
    from .acceptance import run_all

    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise InputError("--only expects comma-separated criterion numbers") from None
    results = run_all(only, jobs=args.jobs)
    report = {
        "ok": all(r.passed for r in results),
        "result": [r.as_dict() for r in results],
    }
    if not report["ok"]:
        raise MathFailure([r.number for r in results if not r.passed], result=report["result"])
    return report


# -- argument parsing --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--context", help="jet context as m,n (even,odd counts); default: smallest Omega X fitting the input")
    common.add_argument("-f", "--file", help="read input from this file instead of stdin")
    common.add_argument("--pretty", action="store_true", help="human-readable output")

    parser = argparse.ArgumentParser(prog="formalvar", description="Exact formal variational calculus on jet superspaces.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text, nexpr=None):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if nexpr is not None:
            p.add_argument("expr", nargs=nexpr, help="expression(s); read from -f/stdin when omitted")
        p.set_defaults(func=func)
        return p

    add("ddx", cmd_ddx, "total derivative", "*")
    add("antiddx", cmd_antiddx, "primitive under the total derivative; exit 1 with an Euler witness if none", "*")
    p = add("euler", cmd_euler, "higher Euler operator delta_{k,a}", "*")
    p.add_argument("-k", type=int, default=0, help="order k (default 0)")
    p.add_argument("-a", default="1", help="variable: t<a>, th<a>, or an even index")
    p.add_argument("--odd", action="store_true", help="treat -a as an odd variable index")
    p = add("bracket", cmd_bracket, "bracket of two polynomials", "*")
    p.add_argument("--kind", choices=("schouten", "lambda", "soloviev", "finite"), default="schouten")
    p.add_argument("--tensor", help="JSON file {context, parity, rows} for soloviev/finite (default: the Omega X tensor)")
    add("is-hamiltonian", cmd_is_hamiltonian, "[[Q,Q]] = 0 for an operator JSON or a density expression", "*")
    p = add("lift", cmd_lift, "compute (or check with --tilde) a strict lift into the cone", "*")
    p.add_argument("--tilde", help="candidate tilde part to check instead of computing one")
    add("dn-check", cmd_dn_check, "first-order operator: Lie-algebraic conditions against [[Q,Q]] = 0")
    p = add("mc", cmd_mc, "curvature of a truncated degree-1 element")
    p.add_argument("--order", type=int, required=True, help="truncation order N")
    p = add("gauge", cmd_gauge, "gauge action exp(X) * A")
    p.add_argument("--order", type=int, required=True, help="truncation order N")
    add("euclid-check", cmd_euclid_check, "Maurer-Cartan test and Lie algebra dictionary in g(V, eta)")
    p = add("selftest", cmd_selftest, "run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    pretty = args.pretty
    try:
        if getattr(args, "order", 1) is not None and getattr(args, "order", 1) < 1:
            raise InputError("--order must be at least 1")
        ctx = parse_context(args.context)
        report = args.func(args, ctx)
    except MathFailure as exc:
        report = {"ok": False, "result": exc.result, "witness": exc.witness}
        report.update(exc.extra)
        emit(report, pretty)
        return 1
    except ParseError as exc:
        emit({"ok": False, "result": None, "error": str(exc), "offset": exc.offset}, pretty)
        return 2
    except (InputError, ValueError, KeyError) as exc:
        emit({"ok": False, "result": None, "error": str(exc) or type(exc).__name__}, pretty)
        return 2
    emit(report, pretty)
    return 0


if __name__ == "__main__":
    sys.exit(main())
