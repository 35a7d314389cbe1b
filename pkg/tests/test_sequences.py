import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import divisor_sigma, totient

from sparse_series.algebraic import build_field
from sparse_series.errors import HorizonInsufficient, InvalidInput, MajorantTooWeak
from sparse_series.sequences import (
    CoefficientSequence,
    add_sequences,
    convolution_power,
    explicit_support,
    fiber_sequence,
    indicator_sequence,
    ones_sequence,
    power_support,
    r_value,
    read_jsonl,
    sequence_from_dict,
    stats,
    sumset,
    write_jsonl,
    xi_from_prefix,
    xi_tail,
    xi_tail_range,
    zero_sequence,
)
from sparse_series.sieve import PowerMap, required_horizon, sieve


def exact_xi(coefs: dict, N: int, t: int) -> Fraction:
    return sum((Fraction(v, t ** (n - N)) for n, v in coefs.items() if n >= N), Fraction(0))


def test_power_support_matches_integer_roots():
    S = power_support(Fraction(3, 2), 10)
    assert S.elements == (1, 2, 5, 8)
    H = 5000
    brute = sorted({math.isqrt(n**3) for n in range(1, 400) if math.isqrt(n**3) < H})
    assert power_support(Fraction(3, 2), H).elements == tuple(brute)
    assert power_support(3, 1001).elements == tuple(k**3 for k in range(1, 11))
    assert power_support(2, 10, include_zero=True).elements == (0, 1, 4, 9)


def test_power_support_rejects_small_exponent():
    with pytest.raises(InvalidInput):
        power_support(1, 10)


@settings(max_examples=40)
@given(st.sets(st.integers(0, 300), min_size=1, max_size=25), st.sets(st.integers(0, 300), min_size=1, max_size=25))
def test_sumset_matches_python_sets(A, B):
    H = 400
    got = sumset(explicit_support(A, H), explicit_support(B, H), H)
    assert got.elements == tuple(sorted({a + b for a in A for b in B if 1 <= a + b < H}))


def test_sumset_of_empty_set_rejected():
    with pytest.raises(InvalidInput):
        sumset(explicit_support([], 10), explicit_support([1], 10), 10)


def test_sumset_squares_and_cubes():
    H = 200
    got = sumset(power_support(2, H, True), power_support(3, H, True), H)
    brute = {a * a + b**3 for a in range(15) for b in range(6)}
    assert got.elements == tuple(sorted(v for v in brute if 1 <= v < H))


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.integers(1, 80), st.integers(1, 9), min_size=1, max_size=30), st.sampled_from([2, 3]))
def test_convolution_power_matches_tuple_enumeration(coefs, j):
    H = 200
    Q2 = build_field([-2, 1])
    a = sequence_from_dict(Q2, H, coefs)
    b = convolution_power(a, j)
    brute = {}
    for tup in itertools.product(coefs.items(), repeat=j):
        n = sum(p for p, _ in tup)
        if n < H:
            brute[n] = brute.get(n, 0) + math.prod(v for _, v in tup)
    assert dict(zip(b.support, b.int_values())) == brute


def test_convolution_of_cubes(Q2):
    a = sequence_from_dict(Q2, 40, {1: 1, 8: 1, 27: 1})
    b = convolution_power(a, 2)
    assert dict(zip(b.support, b.int_values())) == {2: 1, 9: 2, 16: 1, 28: 2, 35: 2}


def test_fiber_of_sigma(Q2):
    H = 8
    a = fiber_sequence(1, sieve("sigma", H), Q2, H)
    assert dict(zip(a.support, a.int_values())) == {1: 1, 3: 1, 4: 1, 6: 1, 7: 1}


def test_fiber_of_phi_small(Q2):
    table = sieve("phi", required_horizon("phi", 3))
    a = fiber_sequence(1, table, Q2, 3)
    # phi(1) = phi(2) = 1 and phi(3) = phi(4) = phi(6) = 2
    assert dict(zip(a.support, a.int_values())) == {1: 2, 2: 3}


def test_fiber_matches_brute_force(Q2):
    H = 300
    phi = sieve("phi", required_horizon("phi", H))
    a = fiber_sequence(phi, sieve("sigma", H), Q2, H)
    brute = {}
    for m in range(1, H):
        s = int(divisor_sigma(m))
        if s < H:
            brute[s] = brute.get(s, 0) + int(totient(m))
    assert dict(zip(a.support, a.int_values())) == brute
    M, r = a.majorant
    assert r < 2 and all(v <= M * r**n for n, v in brute.items())


def test_fiber_over_power_map(Q2):
    a = fiber_sequence(2, PowerMap(2), Q2, 50)
    assert dict(zip(a.support, a.int_values())) == {k * k: 2 for k in range(1, 8)}


def test_fiber_majorant_bounds_unstored_values(Q2):
    # the majorant must cover values past the stored horizon too
    H, big = 100, 3000
    small = fiber_sequence(1, sieve("phi", required_horizon("phi", H)), Q2, H)
    full = fiber_sequence(1, sieve("phi", required_horizon("phi", big)), Q2, big)
    M, r = small.majorant
    for n, v in zip(full.support, full.int_values()):
        assert v <= M * r**n


def test_xi_tail_rational_exact(Q2):
    coefs = {1: 1, 8: 1, 27: 1, 64: 1}
    c = sequence_from_dict(Q2, 100, coefs)
    for N in (0, 1, 5, 9, 30, 64, 99):
        assert xi_tail(c, N, 128).contains(exact_xi(coefs, N, 2))
        assert xi_tail(c, N, 128).width <= Fraction(1, 2**128)
    assert xi_tail(c, 9, 200).contains(Fraction(1, 2**18) + Fraction(1, 2**55))


def test_xi_tail_in_silver_field(silver):
    mpmath.mp.dps = 120
    q = 1 + mpmath.sqrt(2)
    coefs = {2: [1, 0], 5: [0, 1], 11: [3, -1], 40: [2, 2]}
    c = sequence_from_dict(silver, 60, coefs)
    for N in (0, 3, 11, 39):
        ref = sum((a + b * q) * q ** (N - n) for n, (a, b) in coefs.items() if n >= N)
        enc = xi_tail(c, N, 150)
        assert enc.width < Fraction(1, 2**140)
        assert enc.lo - Fraction(1, 10**100) <= Fraction(str(ref)) <= enc.hi + Fraction(1, 10**100)


def test_recurrence_and_prefix_routes_agree(silver, lehmer):
    for K in (silver, lehmer):
        rnd = random.Random(7)
        coefs = {n: [rnd.randint(0, 5)] + [0] * (K.degree - 1) for n in rnd.sample(range(1, 500), 25)}
        c = sequence_from_dict(K, 500, coefs)
        rng = xi_tail_range(c, 0, 120, 100)
        for N in (0, 1, 17, 60, 119):
            direct = xi_tail(c, N, 100)
            pre = xi_from_prefix(c, N, 100)
            assert rng[N].intersects(direct) and pre.intersects(direct)
            assert max(rng[N].width, pre.width, direct.width) < Fraction(1, 2**95)


def test_majorant_tail_enters_enclosure(Q2):
    c = indicator_sequence(Q2, [1], 5)
    enc = xi_tail(c, 0, 64)
    # 1/2 plus at most sum_{n >= 5} 2^-n = 1/16
    assert enc.contains(Fraction(1, 2)) and enc.contains(Fraction(1, 2) + Fraction(1, 16))


def test_majorant_must_beat_the_base(Q2):
    c = CoefficientSequence(Q2, 10, (1,), ((1,),), (Fraction(1), Fraction(3)), True)
    with pytest.raises(MajorantTooWeak):
        xi_tail(c, 0, 64)


def test_invalid_sequences_rejected(Q2):
    with pytest.raises(InvalidInput):
        sequence_from_dict(Q2, 10, {12: 1})
    with pytest.raises(InvalidInput):
        CoefficientSequence(Q2, 10, (3,), ((5,),), (Fraction(1), Fraction(1)), True)
    with pytest.raises(InvalidInput):
        CoefficientSequence(Q2, 10, (3,), ((-1,),), (Fraction(0), Fraction(1)), True)


def test_r_value_brute_force(Q2):
    H = 200
    cubes = indicator_sequence(Q2, power_support(3, H), H)
    coefs = {k**3: 1 for k in range(1, 6)}
    for x, z, eta in [(64, 4, Fraction(1, 2)), (100, 1, 1), (150, 10, Fraction(1, 3))]:
        stop = math.ceil(eta * x)
        brute = sum(
            (Fraction(1, 2**j) for n in range(1, stop) for j in range(math.ceil(z), 200) if n + j in coefs),
            Fraction(0),
        )
        enc = r_value(cubes, x, z, eta)
        assert enc.contains(brute)
    assert float(r_value(cubes, 64, 4, Fraction(1, 2)).mid) == pytest.approx(0.2421875, abs=1e-7)


def test_stats_and_horizon(Q2):
    cubes = indicator_sequence(Q2, power_support(3, 200), 200)
    st_ = stats(cubes, 100, 2)
    assert st_.N_count == 4 and st_.S_value.contains(4)
    with pytest.raises(HorizonInsufficient):
        stats(cubes, 500, 2)


def test_add_sequences(Q2):
    a = sequence_from_dict(Q2, 20, {1: 1, 4: 2})
    b = sequence_from_dict(Q2, 20, {4: -2, 7: 3})
    s = add_sequences(a, b)
    assert dict(zip(s.support, s.int_values())) == {1: 1, 7: 3}


def test_jsonl_round_trip(silver, tmp_path):
    c = sequence_from_dict(silver, 30, {2: [1, 1], 9: [0, 3]}, majorant=(5, 2))
    path = tmp_path / "c.jsonl"
    write_jsonl(c, path)
    back = read_jsonl(path)
    assert back.support == c.support and back.coords == c.coords
    assert back.majorant == c.majorant and back.field == silver
    again = read_jsonl(write_jsonl(c), silver)
    assert again.coords == c.coords


def test_zero_and_ones(Q2):
    z = zero_sequence(Q2, 10)
    assert z.is_zero() and xi_tail(z, 3, 64) == xi_tail(z, 0, 64)
    assert xi_tail(z, 0, 64).hi == 0
    o = ones_sequence(Q2, 50)
    assert xi_tail(o, 10, 64).contains(2)
