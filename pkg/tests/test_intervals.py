from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjsep.intervals import CBox, Interval, Verdict, horner, mpf_to_fraction, parse_dyadic_hex, pow_fraction, working_precision

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


def test_sqrt2_enclosure_is_tight_and_correct():
    with working_precision(256):
        x = Interval.exact(2).sqrt()
        assert (x * x).contains(2)
        assert x.relative_width() < 2.0 ** -240
    assert x.lower_float() <= 2 ** 0.5 <= x.upper_float()


def test_exact_fraction_is_enclosed_not_rounded_away():
    third = Interval.exact(Fraction(1, 3))
    assert third.contains(Fraction(1, 3))
    assert not third.is_point()
    assert Interval.exact(Fraction(3, 4)).is_point()


@given(fractions, fractions)
@settings(max_examples=200, deadline=None)
def test_ring_operations_contain_exact_result(a, b):
    A, B = Interval.exact(a), Interval.exact(b)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)
    if b != 0:
        assert (A / B).contains(a / b)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=10**4, max_denominator=1000),
       st.integers(min_value=2, max_value=7))
@settings(max_examples=100, deadline=None)
def test_roots_contain_exact_root(a, n):
    x = Interval.exact(a ** n)
    assert x.root(n).contains(a)


def test_three_valued_comparisons():
    one, two = Interval.exact(1), Interval.exact(2)
    wide = Interval(Fraction(1, 2), Fraction(3, 2))
    assert one.le(two) is Verdict.HOLDS
    assert two.le(one) is Verdict.FAILS
    assert wide.le(one) is Verdict.INDETERMINATE
    assert one.le(one) is Verdict.HOLDS
    assert one.lt(one) is Verdict.FAILS
    assert wide.consistent_with(one) is Verdict.HOLDS
    assert two.consistent_with(one) is Verdict.FAILS


def test_verdict_combination_is_pessimistic():
    H, F, I = Verdict.HOLDS, Verdict.FAILS, Verdict.INDETERMINATE
    assert Verdict.combine([H, H]) is H
    assert Verdict.combine([H, I]) is I
    assert Verdict.combine([I, F, H]) is F


def test_hex_round_trip_is_exact():
    with working_precision(200):
        x = Interval.exact(3).sqrt()
    y = Interval.from_json(x.to_json())
    assert (y.lo, y.hi) == (x.lo, x.hi)
    assert mpf_to_fraction(parse_dyadic_hex("0x3p-2")) == Fraction(3, 4)


@given(fractions)
@settings(max_examples=100, deadline=None)
def test_hex_round_trip_keeps_sign(q):
    x = Interval.exact(q)
    y = Interval.from_json(x.to_json())
    assert (y.lo, y.hi) == (x.lo, x.hi)
    assert y.contains(q)


def test_negative_interval_rejects_bad_order():
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_log_bounds_enclose_true_log():
    x = Interval.exact(10) ** 30
    lo, hi = x.log_bounds()
    assert lo <= 30 * 2.302585092994046 <= hi


def test_pow_fraction_contains_rational_power():
    with working_precision(128):
        val = pow_fraction(Interval.exact(8), Fraction(2, 3))
    assert val.contains(4)


@given(fractions, fractions, fractions, fractions)
@settings(max_examples=100, deadline=None)
def test_complex_boxes_contain_exact_products(a, b, c, d):
    z, w = CBox(a, b), CBox(c, d)
    prod, diff = z * w, z - w
    assert prod.re.contains(a * c - b * d) and prod.im.contains(a * d + b * c)
    assert diff.re.contains(a - c) and diff.im.contains(b - d)
    assert z.abs2().contains(a * a + b * b)


def test_horner_encloses_polynomial_value():
    # 2 x^3 - x + 5 at x = 1/3
    val = horner([5, -1, 0, 2], CBox.exact(Fraction(1, 3)))
    assert val.re.contains(2 * Fraction(1, 27) - Fraction(1, 3) + 5)
    assert val.im.contains(0)


@given(fractions, fractions, st.integers(min_value=-5, max_value=7))
@settings(max_examples=200, deadline=None)
def test_integer_powers_contain_exact_powers(a, b, k):
    lo, hi = min(a, b), max(a, b)
    x = Interval(lo, hi) if lo != hi else Interval.exact(lo)
    if k < 0 and x.contains_zero():
        return
    p = x ** k
    for v in (lo, hi, (lo + hi) / 2):
        assert p.contains(v ** k)
