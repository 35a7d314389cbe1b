from fractions import Fraction

import pytest
import sympy
from sympy import totient

from sparse_series.errors import InvalidInput
from sparse_series.sequences import indicator_sequence, power_support, sequence_from_dict, zero_sequence
from sparse_series.series_eval import DigitStream, digit_stream, evaluate_series, nonzero_digit_density
from sparse_series.sieve import PowerMap, required_horizon, sieve


def test_zero_series(Q2):
    z = zero_sequence(Q2, 10)
    v = evaluate_series(Q2, z, z)
    assert v.lo == v.hi == 0


def test_cube_series_contains_partial_sum(Q2):
    H = 130
    cubes = indicator_sequence(Q2, power_support(3, H), H)
    v = evaluate_series(Q2, cubes, None, 128)
    partial = sum(Fraction(1, 2 ** (k**3)) for k in range(1, 6))
    assert v.contains(partial)
    assert v.width <= Fraction(1, 2**128)
    assert float(v.mid) == pytest.approx(0.50390625745058059698, rel=1e-15)


def test_silver_indicator_of_one(silver):
    a = sequence_from_dict(silver, 5, {1: 1})
    v = evaluate_series(silver, a, None, 128)
    ref = Fraction(str(sympy.N(sympy.sqrt(2) - 1, 60)))
    assert v.lo - Fraction(1, 10**55) <= ref <= v.hi + Fraction(1, 10**55)
    assert v.width <= Fraction(1, 2**128)


def test_majorant_limited_enclosure(silver):
    # an indicator with an open tail keeps the majorant slack
    a = indicator_sequence(silver, [1], 5)
    v = evaluate_series(silver, a, None, 128)
    assert v.lo < Fraction("0.41422") and v.hi > Fraction("0.43")


def test_sum_of_a_and_b(Q2):
    a = sequence_from_dict(Q2, 20, {1: 1, 3: 2})
    b = sequence_from_dict(Q2, 20, {3: -2, 5: 1})
    v = evaluate_series(Q2, a, b)
    assert v.contains(Fraction(1, 2) + Fraction(1, 32))


def test_cube_digit_stream():
    s = digit_stream(1, PowerMap(3), 2, 100)
    assert list(s.nonzero_positions) == [1, 8, 27, 64]
    assert s.carries == 0 and s.reliable_limit == 100


def test_constant_two_in_base_ten():
    s = digit_stream(2, PowerMap(1), 10, 3)
    assert [int(d) for d in s.digits[1:]] == [2, 2, 2]
    assert s.reliable_limit == 3


def phi_oracle(P, extra=120):
    # exact rational sum over m with phi(m) <= P + extra
    H = P + extra
    top = required_horizon("phi", H)
    return sum((Fraction(1, 2 ** int(totient(m))) for m in range(1, top) if totient(m) < H), Fraction(0))


def test_phi_stream_matches_rational_oracle():
    P = 64
    s = digit_stream(1, sieve("phi", required_horizon("phi", P + 65)), 2, P)
    value = phi_oracle(P)
    assert s.carry_overflow == int(value)
    frac = value - int(value)
    for p in range(1, s.reliable_limit + 1):
        frac *= 2
        digit = int(frac)
        frac -= digit
        assert int(s.digits[p]) == digit, p
    assert s.reliable_limit >= 60


def test_reconstruction_bound():
    P = 64
    s = digit_stream(1, sieve("phi", required_horizon("phi", P + 65)), 2, P)
    err = phi_oracle(P) - s.value_lower()
    assert 0 <= err < Fraction(1, 2**s.reliable_limit)


def test_carry_free_positions_match_support():
    s = digit_stream(1, PowerMap(2), 3, 500)
    assert list(s.nonzero_positions) == [k * k for k in range(1, 23)]


def test_rle_round_trip():
    s = digit_stream(1, PowerMap(3), 2, 1000)
    back = DigitStream.from_rle(s.to_rle())
    assert back.nonzero_positions == s.nonzero_positions
    assert back.reliable_limit == s.reliable_limit and back.base == 2
    assert s.to_rle().splitlines()[1] == "1:1"


def test_density_of_cubes():
    s = digit_stream(1, PowerMap(3), 2, 10**6)
    rows = {r.x: r for r in nonzero_digit_density(s, 3)}
    assert rows[1000].count == 9
    assert rows[10**6].count == 99
    # count * (log x / x)^(1/3) at x = 1000
    ref = 9 * (sympy.log(1000) / 1000) ** sympy.Rational(1, 3)
    v, tol = Fraction(str(sympy.N(ref, 40))), Fraction(1, 10**35)
    enc = rows[1000].normalized
    assert enc.lo - tol <= v <= enc.hi + tol


def test_density_of_dense_and_empty_streams():
    dense = digit_stream(1, PowerMap(1), 3, 100)
    assert [r.count for r in nonzero_digit_density(dense, 1, [10, 100])] == [9, 99]
    empty = digit_stream(0, PowerMap(1), 3, 100)
    assert all(r.count == 0 for r in nonzero_digit_density(empty, 2))


def test_digit_stream_errors():
    with pytest.raises(InvalidInput):
        digit_stream(1, PowerMap(2), 1, 10)
    with pytest.raises(InvalidInput):
        digit_stream(1, PowerMap(2), 2, 0)
