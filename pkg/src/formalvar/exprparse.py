"""Text syntax for differential polynomials.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := rational | var | '(' expr ')'
    var    := ('t'|'th') uint '_' uint

``t2_3`` is the even jet variable ``t[2,3]``; ``th1_0`` is the odd
``th[1,0]``.  Printing emits the canonical sorted-monomial form, which
parses back to the same polynomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .algebra import DiffPoly, JetContext, JetVariable, Monomial, var_index, var_order


class ParseError(ValueError):
    """Syntax or context error; ``offset`` is the 1-based column of the culprit."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    var: JetVariable
    pos: int


@dataclass(frozen=True)
class Sum:
    parts: Tuple[Tuple[int, "Node"], ...]  # (sign, node)


@dataclass(frozen=True)
class Product:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    node: "Node"


Node = Union[Num, Var, Sum, Product, Power, Neg]


def evaluate(node: Node, ctx: JetContext) -> DiffPoly:
    if isinstance(node, Num):
        return ctx.const(node.value)
    if isinstance(node, Var):
        try:
            return ctx.var(node.var)
        except ValueError as exc:
            raise ParseError(str(exc), node.pos) from None
    if isinstance(node, Sum):
        out = ctx.zero()
        for sign, part in node.parts:
            val = evaluate(part, ctx)
            out = out + val if sign > 0 else out - val
        return out
    if isinstance(node, Product):
        out = ctx.one()
        for f in node.factors:
            out = out * evaluate(f, ctx)
        return out
    if isinstance(node, Power):
        return evaluate(node.base, ctx) ** node.exponent
    if isinstance(node, Neg):
        return -evaluate(node.node, ctx)
    raise TypeError(node)


def variables_of(node: Node) -> List[JetVariable]:
    if isinstance(node, Var):
        return [node.var]
    if isinstance(node, Sum):
        return [v for _, p in node.parts for v in variables_of(p)]
    if isinstance(node, Product):
        return [v for f in node.factors for v in variables_of(f)]
    if isinstance(node, (Power,)):
        return variables_of(node.base)
    if isinstance(node, Neg):
        return variables_of(node.node)
    return []


# -- tokenizer and parser ---------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<var>th|t)(?P<idx>\d+)_(?P<ord>\d+)|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*^()]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, object, int]] = []
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                bad = pos
                while bad < n and text[bad].isspace():
                    bad += 1
                raise ParseError(f"unexpected character {text[bad]!r}", bad + 1)
            if m.group("var"):
                start = m.start("var")
                var = JetVariable(m.group("var") == "th", int(m.group("idx")), int(m.group("ord")))
                self.tokens.append(("var", var, start + 1))
            elif m.group("num"):
                start = m.start("num")
                try:
                    num = Fraction(m.group("num"))
                except ZeroDivisionError:
                    raise ParseError("division by zero", start + 1) from None
                self.tokens.append(("num", num, start + 1))
            else:
                start = m.start("op")
                self.tokens.append((m.group("op"), None, start + 1))
            pos = m.end()
        self.tokens.append(("end", None, len(text.rstrip()) + 1))
        self.i = 0

    def peek(self) -> Tuple[str, object, int]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, object, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        kind, _, pos = self.peek()
        what = "end of input" if kind == "end" else repr(kind if kind not in ("var", "num") else self.text[pos - 1])
        raise ParseError(f"expected {expected}, found {what}", pos)

    def expr(self) -> Node:
        parts = []
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        parts.append((sign, self.term()))
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            parts.append((sign, self.term()))
        if len(parts) == 1 and parts[0][0] > 0:
            return parts[0][1]
        if len(parts) == 1:
            return Neg(parts[0][1])
        return Sum(tuple(parts))

    def term(self) -> Node:
        factors = [self.factor()]
        while self.peek()[0] == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            kind, val, _ = self.peek()
            if kind != "num" or val.denominator != 1:
                self.fail("an unsigned integer exponent")
            self.take()
            return Power(base, int(val))
        return base

    def atom(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(val)
        if kind == "var":
            self.take()
            return Var(val, pos)
        if kind == "(":
            self.take()
            inner = self.expr()
            if self.peek()[0] != ")":
                self.fail("')'")
            self.take()
            return inner
        self.fail("a number, variable or '('")


def parse_ast(text: str) -> Node:
    p = _Parser(text)
    if p.peek()[0] == "end":
        raise ParseError("empty expression", 1)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail("an operator or end of input")
    return node


def infer_context(node: Node) -> JetContext:
    """Smallest Omega X context holding every variable of ``node``."""
    m = max([v.index for v in variables_of(node)] + [1])
    return JetContext.omega(m)


def parse(text: str, ctx: Optional[JetContext] = None) -> DiffPoly:
    node = parse_ast(text)
    return evaluate(node, ctx or infer_context(node))


# -- printing ---------------------------------------------------------------


def _mono_sort_key(m: Monomial):
    evens, odds = m
    return (len(odds), sum(e for _, e in evens), evens, odds)


def format_monomial(m: Monomial) -> str:
    evens, odds = m
    parts = []
    for v, e in evens:
        s = f"t{var_index(v)}_{var_order(v)}"
        parts.append(s if e == 1 else f"{s}^{e}")
    for v in odds:
        parts.append(f"th{var_index(v)}_{var_order(v)}")
    return "*".join(parts)


def format_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(u: DiffPoly) -> str:
    if not u.terms:
        return "0"
    out = []
    for i, m in enumerate(sorted(u.terms, key=_mono_sort_key)):
        c = u.terms[m]
        neg = c < 0
        mag = -c if neg else c
        body = format_monomial(m)
        if not body:
            text = format_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{format_coeff(mag)}*{body}"
        if i == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f" - {text}" if neg else f" + {text}")
    return "".join(out)
