"""Tables of sigma, phi, d, omega and Omega below a horizon.

The sieve walks the primes p <= sqrt(X) and, for every multiple of p, finds
the exact exponent of p with vectorised numpy passes.  What is left of n
after removing those primes is 1 or a single prime > sqrt(X), which is
folded in at the end.  All values are exact int64.
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sympy import integer_nthroot

from .errors import HorizonInsufficient, HorizonTooLarge, InvalidInput, OutOfHorizon
from .intervals import Interval, log_interval

__all__ = [
    "FUNCTIONS",
    "ArithTable",
    "PowerMap",
    "sieve",
    "summatory",
    "value_set_count",
    "phi_lower_bound_check",
    "PhiBound",
    "required_horizon",
    "small_primes",
]

FUNCTIONS = ("sigma", "phi", "divisor_count", "omega_distinct", "omega_with_multiplicity")
_ALIASES = {
    "sigma": "sigma",
    "phi": "phi",
    "d": "divisor_count",
    "divisor_count": "divisor_count",
    "omega": "omega_distinct",
    "omega_distinct": "omega_distinct",
    "Omega": "omega_with_multiplicity",
    "omega_with_multiplicity": "omega_with_multiplicity",
}
_CODES = {name: i + 1 for i, name in enumerate(FUNCTIONS)}

MAGIC = b"SSAT"
DEFAULT_MAX_HORIZON = 60_000_000
WITNESS_CAP = 10**6
PHI_HORIZON_FACTOR = 4


def canonical_id(function_id: str) -> str:
    try:
        return _ALIASES[function_id]
    except KeyError:
        raise InvalidInput(
            f"unknown arithmetic function {function_id!r}; expected one of {', '.join(FUNCTIONS)}"
        ) from None


def small_primes(n: int) -> np.ndarray:
    """Primes <= n (Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True, eq=False)
class ArithTable:
    function_id: str
    horizon: int
    values: np.ndarray = field(repr=False)  # values[n] for 0 <= n < horizon, values[0] = 0

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n < self.horizon:
            raise OutOfHorizon(f"n={n} outside 1..{self.horizon - 1}")
        return int(self.values[n])

    def as_list(self) -> list:
        return [int(v) for v in self.values[1:]]

    # -- fibres --------------------------------------------------------
    def preimages_below(self, H: int):
        """Arrays (m, g(m)) over every m >= 1 with g(m) < H."""
        need = required_horizon(self.function_id, H)
        if self.horizon < need:
            raise HorizonInsufficient(
                f"{self.function_id} table horizon {self.horizon} too small for values below {H}; "
                f"need at least {need}",
                required=need,
            )
        if self.function_id == "phi":
            _verify_phi_top_decile(self, H)
        m = np.arange(1, self.horizon, dtype=np.int64)
        vals = self.values[1:]
        keep = vals < H
        return m[keep], vals[keep]

    # -- export --------------------------------------------------------
    def to_bytes(self) -> bytes:
        header = MAGIC + struct.pack("<IQ", _CODES[self.function_id], self.horizon)
        return header + self.values[1:].astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ArithTable":
        if len(blob) < 16 or blob[:4] != MAGIC:
            raise InvalidInput("not an arithmetic table file (bad magic)")
        code, horizon = struct.unpack("<IQ", blob[4:16])
        names = {v: k for k, v in _CODES.items()}
        if code not in names:
            raise InvalidInput(f"unknown function code {code}")
        body = np.frombuffer(blob[16:], dtype="<u8")
        if body.size != horizon - 1:
            raise InvalidInput(f"table body has {body.size} entries, header says {horizon - 1}")
        values = np.zeros(horizon, dtype=np.int64)
        values[1:] = body.astype(np.int64)
        return cls(names[code], horizon, values)

    def write_binary(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read_binary(cls, path) -> "ArithTable":
        return cls.from_bytes(Path(path).read_bytes())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        for n in range(1, self.horizon):
            w.writerow([n, int(self.values[n])])
        return buf.getvalue()


@dataclass(frozen=True)
class PowerMap:
    """g(m) = m^k, an exact stand-in for a table when the map is a power."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput("power map exponent must be >= 1")

    @property
    def function_id(self) -> str:
        return f"power:{self.k}"

    def __call__(self, m: int) -> int:
        return m**self.k

    def preimages_below(self, H: int):
        top = int(integer_nthroot(max(H - 1, 0), self.k)[0]) if H > 1 else 0
        m = np.arange(1, top + 1, dtype=object if top**self.k >= 2**62 else np.int64)
        return m, m**self.k


def required_horizon(function_id: str, x: int) -> int:
    """Sieve horizon that covers every m with f(m) < x."""
    function_id = canonical_id(function_id)
    x = max(int(math.ceil(x)), 2)
    if function_id == "sigma":
        return x  # m <= sigma(m), so m < x
    if function_id == "phi":
        lnln = math.log(math.log(x)) if x > math.e else 0.0
        return math.ceil(PHI_HORIZON_FACTOR * x * max(1.0, lnln)) + 1
    raise InvalidInput(f"{function_id} has infinite fibres; it cannot serve as an index map")


def _verify_phi_top_decile(table: ArithTable, x: int) -> None:
    start = max(1, (9 * table.horizon) // 10)
    top = table.values[start:]
    if top.size and int(top.min()) < x:
        need = 2 * table.horizon
        raise HorizonInsufficient(
            f"phi takes a value below {x} in the top decile of the horizon {table.horizon}",
            required=need,
        )


def sieve(function_id: str, X: int, max_horizon: int = DEFAULT_MAX_HORIZON) -> ArithTable:
    """Exact values f(n) for 1 <= n < X."""
    function_id = canonical_id(function_id)
    X = int(X)
    if X < 2:
        raise InvalidInput("sieve horizon must be >= 2")
    if X > max_horizon:
        raise HorizonTooLarge(f"horizon {X} exceeds the memory budget {max_horizon}")
    additive = function_id in ("omega_distinct", "omega_with_multiplicity")
    vals = np.zeros(X, dtype=np.int64) if additive else np.ones(X, dtype=np.int64)
    rem = np.arange(X, dtype=np.int64)
    for p in small_primes(math.isqrt(X - 1)).tolist():
        mult = np.arange(p, X, p, dtype=np.int64)
        q = mult // p
        e = np.ones(mult.size, dtype=np.int64)
        pe = np.full(mult.size, p, dtype=np.int64)
        m = q % p == 0
        while m.any():
            e[m] += 1
            pe[m] *= p
            q[m] //= p
            m &= q % p == 0
        rem[p::p] //= pe
        if function_id == "sigma":
            vals[p::p] *= (pe * p - 1) // (p - 1)
        elif function_id == "phi":
            vals[p::p] *= (pe // p) * (p - 1)
        elif function_id == "divisor_count":
            vals[p::p] *= e + 1
        elif function_id == "omega_distinct":
            vals[p::p] += 1
        else:
            vals[p::p] += e
    big = rem > 1
    if function_id == "sigma":
        vals[big] *= rem[big] + 1
    elif function_id == "phi":
        vals[big] *= rem[big] - 1
    elif function_id == "divisor_count":
        vals[big] *= 2
    else:
        vals[big] += 1
    vals[0] = 0
    return ArithTable(function_id, X, vals)


def _upto(table: ArithTable, x) -> int:
    n = math.floor(x)
    if n >= table.horizon:
        raise OutOfHorizon(f"x={x} beyond table horizon {table.horizon}")
    return max(n, 0)


def summatory(table: ArithTable, weight_exponent: int, x) -> int:
    """Exact sum of f(n)^k over 1 <= n <= x."""
    n = _upto(table, x)
    k = int(weight_exponent)
    if k < 0:
        raise InvalidInput("weight exponent must be >= 0")
    if n == 0:
        return 0
    vals, counts = np.unique(table.values[1 : n + 1], return_counts=True)
    return sum(int(v) ** k * int(c) for v, c in zip(vals.tolist(), counts.tolist()))


def value_set_count(table: ArithTable, x, cap: int = WITNESS_CAP):
    """(count, values) for the distinct values of f lying in [1, x)."""
    x = int(math.ceil(x))
    need = required_horizon(table.function_id, x)
    if table.horizon < need:
        raise HorizonInsufficient(
            f"value set of {table.function_id} below {x} needs horizon >= {need}, table has {table.horizon}",
            required=need,
        )
    if table.function_id == "phi":
        _verify_phi_top_decile(table, x)
    vals = table.values[1:]
    distinct = np.unique(vals[(vals >= 1) & (vals < x)])
    return int(distinct.size), tuple(int(v) for v in distinct[:cap])


@dataclass(frozen=True)
class PhiBound:
    minimum: Interval
    argmin: int
    x: int

    def __float__(self):
        return float(self.minimum.mid)


def phi_lower_bound_check(table: ArithTable, x) -> PhiBound:
    """Minimum of phi(n) log log n / n over 3 <= n < x, with a certified enclosure."""
    if table.function_id != "phi":
        raise InvalidInput("phi_lower_bound_check needs a phi table")
    x = int(math.ceil(x))
    if x < 10:
        raise InvalidInput("x must be >= 10")
    if x - 1 >= table.horizon:
        raise OutOfHorizon(f"x={x} beyond table horizon {table.horizon}")
    n = np.arange(3, x, dtype=np.float64)
    ratio = table.values[3:x] * np.log(np.log(n)) / n
    best = float(ratio.min())
    # float screening, then exact enclosures for every near-minimal candidate
    cands = np.flatnonzero(ratio <= best * (1 + 1e-9) + 1e-12) + 3
    result = None
    for c in cands.tolist():
        val = Interval(table[c]) * log_interval(log_interval(c, 96), 96) / c
        if result is None or val.hi < result[0].hi:
            result = (val, c)
    return PhiBound(result[0].round_out(64), result[1], x)
