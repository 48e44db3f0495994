from fractions import Fraction

import pytest
from hypothesis import given

from formalvar import JetContext, ParseError, format_poly, parse
from formalvar.hamiltonian import kdv_density

from conftest import poly, rngs, some_context


def test_kdv_representative():
    u = parse("1/8*th1_0*th1_3 + t1_0*th1_0*th1_1")
    ctx = u.ctx
    assert u == (ctx.th(1, 0) * ctx.th(1, 3)).scale(Fraction(1, 8)) + ctx.t(1) * ctx.th(1) * ctx.th(1, 1)
    assert u == kdv_density()


def test_odd_power_normalizes_to_zero():
    assert not parse("th1_0^2")


def test_syntax_error_offset():
    with pytest.raises(ParseError) as err:
        parse("t1_0 + + t1_1")
    assert err.value.offset == 8


@pytest.mark.parametrize(
    "text, offset",
    [("", 1), ("t1_0 *", 7), ("(t1_0", 6), ("t1", 1), ("t1_0 t1_1", 6), ("2/0", 1)],
)
def test_other_errors(text, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.offset == offset


def test_variable_outside_context():
    with pytest.raises(ParseError) as err:
        parse("t1_0 + t3_0", JetContext.omega(2))
    assert err.value.offset == 8


def test_arithmetic_forms():
    assert parse("-(t1_0 - 2)^2") == parse("-t1_0^2 + 4*t1_0 - 4")
    assert parse("3/6") == parse("1/2")


@given(rngs)
def test_round_trip(rng):
    ctx = some_context(rng, max_even=3, max_odd=3)
    u = poly(rng, ctx, max_theta=3, order=3, terms=4)
    text = format_poly(u)
    assert parse(text, ctx) == u
    assert format_poly(parse(text, ctx)) == text
