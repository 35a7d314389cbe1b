import math

import numpy as np
import pytest
from sympy import divisor_count, divisor_sigma, primefactors, primeomega, totient

from sparse_series.errors import HorizonInsufficient, HorizonTooLarge, InvalidInput, OutOfHorizon
from sparse_series.sieve import (
    ArithTable,
    PowerMap,
    phi_lower_bound_check,
    required_horizon,
    sieve,
    summatory,
    value_set_count,
)

ORACLES = {
    "sigma": lambda n: int(divisor_sigma(n)),
    "phi": lambda n: int(totient(n)),
    "divisor_count": lambda n: int(divisor_count(n)),
    "omega_distinct": lambda n: len(primefactors(n)),
    "omega_with_multiplicity": lambda n: int(primeomega(n)),
}


@pytest.mark.parametrize("fid", sorted(ORACLES))
def test_sieve_matches_sympy(fid):
    X = 2500
    table = sieve(fid, X)
    oracle = ORACLES[fid]
    assert table.as_list() == [oracle(n) for n in range(1, X)]


@pytest.mark.parametrize("X", [2, 3, 4, 5, 9, 10, 26, 49, 50])
def test_sieve_small_horizons(X):
    assert sieve("phi", X).as_list() == [int(totient(n)) for n in range(1, X)]


def test_aliases_and_first_values():
    assert sieve("phi", 11).as_list() == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert sieve("sigma", 13)[6] == 12
    assert sieve("d", 13)[12] == 6
    assert sieve("Omega", 17)[16] == 4
    assert sieve("omega", 31)[30] == 3


def test_value_set_of_phi_below_ten():
    table = sieve("phi", required_horizon("phi", 10))
    assert value_set_count(table, 10) == (5, (1, 2, 4, 6, 8))


def test_value_set_of_sigma_below_ten():
    assert value_set_count(sieve("sigma", 10), 10) == (6, (1, 3, 4, 6, 7, 8))


def test_summatory():
    phi = sieve("phi", 101)
    assert summatory(phi, 1, 10) == 32
    assert summatory(phi, 0, 10) == 10
    assert summatory(phi, 2, 100) == sum(int(totient(n)) ** 2 for n in range(1, 101))
    with pytest.raises(OutOfHorizon):
        summatory(phi, 1, 101)


def test_phi_preimages_need_wide_horizon():
    small = sieve("phi", 200)
    with pytest.raises(HorizonInsufficient) as err:
        small.preimages_below(100)
    assert err.value.required >= required_horizon("phi", 100)
    table = sieve("phi", required_horizon("phi", 100))
    m, g = table.preimages_below(100)
    brute = sorted((k, int(totient(k))) for k in range(1, 2000) if totient(k) < 100)
    assert sorted(zip(m.tolist(), g.tolist())) == brute


def test_sigma_preimages():
    m, g = sieve("sigma", 50).preimages_below(50)
    brute = [(k, int(divisor_sigma(k))) for k in range(1, 50) if divisor_sigma(k) < 50]
    assert list(zip(m.tolist(), g.tolist())) == brute


def test_index_map_must_have_finite_fibres():
    with pytest.raises(InvalidInput):
        required_horizon("divisor_count", 10)


def test_power_map_preimages():
    m, g = PowerMap(3).preimages_below(1001)
    assert m.tolist() == list(range(1, 11)) and g.tolist() == [k**3 for k in range(1, 11)]
    m, _ = PowerMap(3).preimages_below(1000)
    assert m.tolist() == list(range(1, 10))


def test_binary_round_trip(tmp_path):
    table = sieve("sigma", 1000)
    path = tmp_path / "sigma.bin"
    table.write_binary(path)
    back = ArithTable.read_binary(path)
    assert back.function_id == "sigma" and back.horizon == 1000
    assert np.array_equal(back.values, table.values)
    blob = path.read_bytes()
    assert blob[:4] == b"SSAT" and len(blob) == 16 + 8 * 999
    with pytest.raises(InvalidInput):
        ArithTable.from_bytes(b"XXXX" + blob[4:])


def test_csv_export():
    text = sieve("phi", 6).to_csv()
    assert text == "n,value\n1,1\n2,1\n3,2\n4,2\n5,4\n"


def test_table_is_read_only():
    table = sieve("phi", 20)
    with pytest.raises(ValueError):
        table.values[3] = 0


def test_errors():
    with pytest.raises(InvalidInput):
        sieve("mobius", 10)
    with pytest.raises(InvalidInput):
        sieve("phi", 1)
    with pytest.raises(HorizonTooLarge):
        sieve("phi", 10**9)
    with pytest.raises(OutOfHorizon):
        sieve("phi", 10)[10]


def test_phi_lower_bound_minimum():
    # min of phi(n) log log n / n over 3 <= n < 10^4; brute force with floats
    X = 10**4
    table = sieve("phi", X)
    vals = [(int(totient(n)) * math.log(math.log(n)) / n, n) for n in range(3, X)]
    best, arg = min(vals)
    res = phi_lower_bound_check(table, X)
    assert res.argmin == arg == 3
    assert float(res.minimum.lo) <= best <= float(res.minimum.hi) + 1e-15
    assert float(res) == pytest.approx(2 * math.log(math.log(3)) / 3, rel=1e-14)
