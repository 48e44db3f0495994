"""Acceptance criteria 1-10, each run once and reported as a single line."""

import pytest

from formalvar.acceptance import CRITERIA

REPORT = {}
_cache = {}


def result(number):
    if number not in _cache:
        r = CRITERIA[number]()
        _cache[number] = r
        REPORT[number] = r.line()
        print(r.line())
    return _cache[number]


def _failing(r):
    return [c.name for c in r.checks if c.literal and not c.passed]


@pytest.mark.parametrize(
    "number",
    [1, 3, 4, pytest.param(5, marks=pytest.mark.slow), 6, 7, pytest.param(9, marks=pytest.mark.slow), 10],
)
def test_criterion(number):
    r = result(number)
    assert r.in_time, r.line()
    assert r.passed, _failing(r)


# Criteria 2 and 8 each contain one identity that is false as stated; the
# literal checks are expected to fail and the corrected companions to pass.


@pytest.mark.xfail(strict=True, reason="the stated +1/8 tilde coefficient violates the Maurer-Cartan equation")
def test_criterion_2_as_stated():
    assert result(2).passed


def test_criterion_2_corrected():
    r = result(2)
    assert r.in_time and r.corrected_passed
    assert _failing(r) == [
        "lift family with +1/8 eps th th1 th2",
        "compute_lift tilde differs from a family member by an exact term",
    ]


@pytest.mark.xfail(strict=True, reason="T tau keeps the metric Euler term of tau0(alpha) in its body")
def test_criterion_8_as_stated():
    assert result(8).passed


def test_criterion_8_corrected():
    r = result(8)
    assert r.in_time and r.corrected_passed
    assert _failing(r) == ["T tau(a~, a) = tau0(a~) + eps tau0(a)"]
