import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_series.errors import InvalidInput
from sparse_series.intervals import (
    ComplexBox,
    Interval,
    exp_interval,
    log_interval,
    parse_rational,
    rational_to_str,
    round_down,
    round_up,
)

fracs = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


def iv(a, b):
    return Interval(min(a, b), max(a, b))


@given(fracs, fracs, fracs, fracs, st.floats(0, 1), st.floats(0, 1))
def test_arithmetic_contains_pointwise_results(a, b, c, d, s, t):
    x, y = iv(a, b), iv(c, d)
    px = x.lo + Fraction(s) * x.width
    py = y.lo + Fraction(t) * y.width
    assert (x + y).contains(px + py)
    assert (x - y).contains(px - py)
    assert (x * y).contains(px * py)
    if not y.contains(0):
        assert (x / y).contains(px / py)


@given(fracs, st.integers(1, 200))
def test_directed_rounding_brackets(v, prec):
    lo, hi = round_down(v, prec), round_up(v, prec)
    assert lo <= v <= hi
    if v:
        assert (hi - lo) <= abs(v) * Fraction(2, 2**prec) * 2


def mp_fraction(x):
    sign, man, exp, _ = x._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)


@settings(max_examples=60)
@given(st.fractions(min_value=Fraction(1, 10**4), max_value=10**9, max_denominator=10**4))
def test_log_exp_enclose_mpmath(v):
    mpmath.mp.prec = 300
    eps = Fraction(1, 2**280)
    ref = mp_fraction(mpmath.log(mpmath.mpf(v.numerator) / v.denominator))
    L = log_interval(v, 120)
    assert L.lo <= ref + eps * max(1, abs(ref)) and L.hi >= ref - eps * max(1, abs(ref))
    assert L.width < Fraction(1, 2**100) * max(1, abs(L.hi))
    w = Fraction(v.numerator % 97, 7)
    ref = mp_fraction(mpmath.exp(mpmath.mpf(w.numerator) / w.denominator))
    E = exp_interval(Interval(w), 120)
    assert E.lo <= ref * (1 + eps) and E.hi >= ref * (1 - eps)
    assert E.width < E.hi / 2**100


def test_log_interval_exact_points():
    assert log_interval(1, 64).contains(0)
    L = log_interval(Fraction(10), 128)
    assert L.lo < Fraction(math.log(10)).limit_denominator(10**15) + Fraction(1, 10**12)
    assert float(L.mid) == pytest.approx(math.log(10), rel=1e-15)


def test_sqrt_and_powers():
    r = Interval(2).sqrt(100)
    assert r.lo**2 <= 2 <= r.hi**2
    assert r.width < Fraction(1, 2**95)
    assert (Interval(-2, 3) ** 2) == Interval(0, 9)
    p = Interval(Fraction(3, 2)).pow_rounded(40, 64)
    assert p.contains(Fraction(3, 2) ** 40)


def test_empty_interval_rejected():
    with pytest.raises(InvalidInput):
        Interval(2, 1)


def test_reciprocal_of_zero_straddle_rejected():
    with pytest.raises((InvalidInput, ZeroDivisionError)):
        Interval(-1, 1).reciprocal()


def test_complex_box_product_and_modulus():
    z = ComplexBox(Interval(1), Interval(1))
    w = z * z
    assert w.re.contains(0) and w.im.contains(2)
    m = z.modulus()
    assert m.lo**2 <= 2 <= m.hi**2


@pytest.mark.parametrize(
    "value,text",
    [(Fraction(1, 2), "0.5"), (Fraction(3), "3"), (Fraction(-5, 8), "-0.625"), (Fraction(1, 3), "1/3")],
)
def test_rational_text_round_trip(value, text):
    assert rational_to_str(value) == text
    assert parse_rational(text) == value


def test_parse_rational_accepts_scientific():
    assert parse_rational("1e3") == 1000
    assert parse_rational("2.5") == Fraction(5, 2)
