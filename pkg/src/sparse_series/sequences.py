"""Coefficient sequences over Z[q] and their finite statistics.

A :class:`CoefficientSequence` stores the nonzero coefficients c(n) for
1 <= n < H exactly, plus a tail majorant (M, r): for every n >= H the
coefficient is promised to satisfy house(c(n)) <= M r^n.  M = 0 declares
that the support ends below H.  When M > 0 the stored coefficients obey the
same bound (checked on construction), so (M, r) is a majorant for all n.

Tail sums are evaluated in fixed point: every quantity is an integer scaled
by 2^W with floor / ceiling rounding on the two endpoints, which keeps the
enclosures rigorous while staying fast on long windows.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from sympy import integer_nthroot

from .algebraic import AlgebraicField, FieldElement, build_field
from .errors import (
    HorizonInsufficient,
    InvalidInput,
    MajorantTooWeak,
    OverflowPolicy,
)
from .intervals import Interval, as_fraction, rational_to_str
from .sieve import ArithTable, PowerMap

__all__ = [
    "SupportSet",
    "CoefficientSequence",
    "TailStats",
    "explicit_support",
    "power_support",
    "sumset",
    "indicator_sequence",
    "ones_sequence",
    "zero_sequence",
    "sequence_from_dict",
    "fiber_sequence",
    "fiber_values",
    "add_sequences",
    "convolution_power",
    "stats",
    "xi_tail",
    "xi_tail_range",
    "xi_from_prefix",
    "xi_prefix_range",
    "r_value",
    "polynomial_majorant",
    "write_jsonl",
    "read_jsonl",
]

# r for majorants that fold a polynomial factor into a geometric one
FOLD_RATIO = 1 + Fraction(1, 1 << 20)


# ---------------------------------------------------------------------------
# supports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportSet:
    elements: tuple
    horizon: int
    generator_id: str = "explicit"

    def __post_init__(self):
        els = self.elements
        if any(b <= a for a, b in zip(els, els[1:])):
            raise InvalidInput("support elements must be strictly increasing")
        if els and (els[0] < 0 or els[-1] >= self.horizon):
            raise InvalidInput(f"support elements must lie in [0, {self.horizon})")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, n):
        i = bisect_left(self.elements, n)
        return i < len(self.elements) and self.elements[i] == n

    def count_below(self, x) -> int:
        return bisect_left(self.elements, math.ceil(x))


def explicit_support(elements: Iterable[int], H: int, generator_id: str = "explicit") -> SupportSet:
    els = sorted({int(e) for e in elements if int(e) < H})
    return SupportSet(tuple(els), int(H), generator_id)


def _as_rational_exponent(alpha) -> Fraction:
    alpha = as_fraction(alpha)
    if alpha <= 1:
        raise InvalidInput(f"exponent {alpha} must be > 1")
    return alpha


def power_support(alpha, H: int, include_zero: bool = False) -> SupportSet:
    """{floor(n^alpha) : n >= 1} below H, with exact integer roots."""
    alpha = _as_rational_exponent(alpha)
    p, q = alpha.numerator, alpha.denominator
    out = [0] if include_zero and H > 0 else []
    n = 1
    while True:
        v = int(integer_nthroot(n**p, q)[0])
        if v >= H:
            break
        if not out or v != out[-1]:
            out.append(v)
        n += 1
    return SupportSet(tuple(out), int(H), f"power:{alpha}")


def sumset(A: SupportSet, B: SupportSet, H: int) -> SupportSet:
    """{a + b} intersected with [1, H)."""
    if not len(A) or not len(B):
        raise InvalidInput("sumset needs two non-empty sets")
    a = np.asarray(A.elements, dtype=np.int64)
    b = np.asarray(B.elements, dtype=np.int64)
    a, b = a[a < H], b[b < H]
    hits = np.zeros(int(H), dtype=bool)
    step = max(1, 4_000_000 // max(1, b.size))
    for i in range(0, a.size, step):
        s = np.add.outer(a[i : i + step], b).ravel()
        s = s[(s >= 1) & (s < H)]
        hits[s] = True
    return SupportSet(tuple(np.flatnonzero(hits).tolist()), int(H),
                      f"sumset({A.generator_id},{B.generator_id})")


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    field: AlgebraicField
    horizon: int
    support: tuple  # sorted n with c(n) != 0
    coords: tuple  # coordinate tuples aligned with support
    majorant: tuple  # (M, r) as Fractions
    nonnegative: bool = False  # every c(n), stored or beyond H, is >= 0 in the real embedding
    source: str = "explicit"
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        H = self.horizon
        if H < 1:
            raise InvalidInput("horizon must be >= 1")
        sup = self.support
        if any(b <= a for a, b in zip(sup, sup[1:])):
            raise InvalidInput("support must be strictly increasing")
        if sup and (sup[0] < 1 or sup[-1] >= H):
            raise InvalidInput(f"support must lie in [1, {H})")
        if len(self.coords) != len(sup):
            raise InvalidInput("coords and support differ in length")
        d = self.field.degree
        for c in self.coords:
            if len(c) != d or not any(c):
                raise InvalidInput("stored coefficients must be nonzero elements of the field")
        M, r = (as_fraction(v) for v in self.majorant)
        if M < 0 or r < 1:
            raise InvalidInput("majorant needs M >= 0 and r >= 1")
        object.__setattr__(self, "majorant", (M, r))
        if M > 0:
            self._check_majorant()
        if self.nonnegative:
            self._check_nonnegative()

    # -- validation ----------------------------------------------------
    def _check_majorant(self):
        M, r = self.majorant
        if self.is_rational_valued():
            if all(abs(c[0]) <= M for c in self.coords):
                return
        for n, c in zip(self.support, self.coords):
            bound = M * Interval(r).pow_rounded(n, 64).lo
            h = self.field.house_upper(FieldElement(c))
            if h > bound and self.field.house(FieldElement(c), 32).hi > bound:
                raise InvalidInput(f"coefficient at n={n} exceeds the majorant {M}*{r}^n")

    def _check_nonnegative(self):
        if self.is_rational_valued():
            if any(c[0] < 0 for c in self.coords):
                raise InvalidInput("sequence declared non-negative has a negative coefficient")
            return
        for c in self.coords:
            lo, _ = self.field.eval_fixed(FieldElement(c), 64)
            if lo < 0:
                raise InvalidInput("sequence declared non-negative has a coefficient not certified >= 0")

    # -- access --------------------------------------------------------
    def __len__(self):
        return len(self.support)

    def is_rational_valued(self) -> bool:
        key = "rational"
        if key not in self._cache:
            self._cache[key] = all(not any(c[1:]) for c in self.coords)
        return self._cache[key]

    def is_zero(self) -> bool:
        return not self.support and self.majorant[0] == 0

    def coef(self, n: int) -> FieldElement:
        i = bisect_left(self.support, n)
        if i < len(self.support) and self.support[i] == n:
            return FieldElement(self.coords[i])
        if n >= self.horizon:
            raise HorizonInsufficient(f"n={n} beyond horizon {self.horizon}", required=n + 1)
        return self.field.zero()

    def items(self):
        for n, c in zip(self.support, self.coords):
            yield n, FieldElement(c)

    def int_values(self) -> list:
        if not self.is_rational_valued():
            raise InvalidInput("sequence has non-rational coefficients")
        return [c[0] for c in self.coords]

    def support_set(self) -> SupportSet:
        return SupportSet(self.support, self.horizon, f"support({self.source})")

    def count_below(self, x) -> int:
        return bisect_left(self.support, math.ceil(x))

    def house_upper_values(self) -> list:
        """Rational upper bounds of house(c(n)) over the stored support."""
        hit = self._cache.get("house_hi")
        if hit is None:
            if self.is_rational_valued():
                hit = [Fraction(abs(c[0])) for c in self.coords]
            else:
                hit = [self.field.house(FieldElement(c), 48).hi for c in self.coords]
            self._cache["house_hi"] = hit
        return hit

    def house_values(self) -> list:
        hit = self._cache.get("house")
        if hit is None:
            if self.is_rational_valued():
                hit = [Interval(abs(c[0])) for c in self.coords]
            else:
                hit = [self.field.house(FieldElement(c), 48) for c in self.coords]
            self._cache["house"] = hit
        return hit

    def to_dict(self) -> dict:
        M, r = self.majorant
        return {
            "source": self.source,
            "horizon": self.horizon,
            "support_size": len(self.support),
            "majorant": [rational_to_str(M), rational_to_str(r)],
            "nonnegative": self.nonnegative,
        }

    # -- fixed-point principal values ---------------------------------
    def _fixed(self, W: int, absolute: bool):
        key = ("fixed", W, absolute)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.is_rational_valued():
            lo = [c[0] << W for c in self.coords]
            if absolute:
                lo = [abs(v) for v in lo]
            hi = lo
        else:
            lo, hi = [], []
            for c in self.coords:
                a, b = self.field.eval_fixed(FieldElement(c), W)
                if absolute:
                    a, b = (a, b) if a >= 0 else ((-b, -a) if b <= 0 else (0, max(-a, b)))
                lo.append(a)
                hi.append(b)
        mag = [max(abs(a), abs(b)) for a, b in zip(lo, hi)]
        suffix = [0] * (len(mag) + 1)
        for i in range(len(mag) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + mag[i]
        out = (lo, hi, suffix)
        self._cache[key] = out
        return out

    def working_bits(self, precision: int) -> int:
        if self.coords:
            big = max(max(abs(v) for v in c).bit_length() for c in self.coords)
        else:
            big = 0
        return precision + 40 + big + len(self.support).bit_length()


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _rational_coords(field: AlgebraicField, v: int) -> tuple:
    return (int(v),) + (0,) * (field.degree - 1)


def sequence_from_dict(field: AlgebraicField, H: int, coefs: Mapping, majorant=(0, 1),
                       nonnegative: bool | None = None, source: str = "explicit") -> CoefficientSequence:
    """Sequence from {n: coefficient}; a coefficient is an int or a coordinate list."""
    items = []
    for n, v in coefs.items():
        n = int(n)
        c = _rational_coords(field, v) if isinstance(v, int) else field.check(
            v if isinstance(v, FieldElement) else FieldElement(list(v) + [0] * (field.degree - len(v)))
        ).coords
        if any(c):
            if not 1 <= n < H:
                raise InvalidInput(f"index {n} outside [1, {H})")
            items.append((n, tuple(c)))
    items.sort()
    support = tuple(n for n, _ in items)
    coords = tuple(c for _, c in items)
    if nonnegative is None:
        nonnegative = all(not any(c[1:]) and c[0] >= 0 for c in coords) and majorant[0] == 0
    return CoefficientSequence(field, int(H), support, coords, tuple(majorant), nonnegative, source)


def indicator_sequence(field: AlgebraicField, support, H: int | None = None) -> CoefficientSequence:
    """c(n) = 1 on the support (index 0 dropped), majorant (1, 1)."""
    if isinstance(support, SupportSet):
        H = support.horizon if H is None else H
        elems = support.elements
        gen = support.generator_id
    else:
        elems = sorted(set(int(e) for e in support))
        gen = "explicit"
        if H is None:
            raise InvalidInput("horizon required for a plain support list")
    elems = tuple(e for e in elems if 1 <= e < H)
    one = _rational_coords(field, 1)
    return CoefficientSequence(field, int(H), elems, (one,) * len(elems), (Fraction(1), Fraction(1)),
                               True, f"indicator:{gen}")


def ones_sequence(field: AlgebraicField, H: int) -> CoefficientSequence:
    one = _rational_coords(field, 1)
    return CoefficientSequence(field, int(H), tuple(range(1, H)), (one,) * (H - 1),
                               (Fraction(1), Fraction(1)), True, "ones")


def zero_sequence(field: AlgebraicField, H: int) -> CoefficientSequence:
    return CoefficientSequence(field, int(H), (), (), (Fraction(0), Fraction(1)), True, "zero")


def _ln_lower(s: Fraction) -> Fraction:
    e = s - 1  # ln(1+e) >= e - e^2/2 for e >= 0
    return e - e * e / 2


def polynomial_majorant(C, D: int, s: Fraction = FOLD_RATIO) -> Fraction:
    """K with C n^D <= K s^n for all n >= 1, from n^D <= (D/(e ln s))^D s^n."""
    C = as_fraction(C)
    if D <= 0:
        return C
    base = Fraction(D) / (Fraction(2718281, 1000000) * _ln_lower(s))  # e > 2.718281
    return C * _ceil_fraction(base) ** D


def _ceil_fraction(v: Fraction) -> int:
    return -((-v.numerator) // v.denominator)


# growth exponents e_f with f(m) <= m^e_f for all m >= 1
_GROWTH = {"sigma": 2, "phi": 1, "divisor_count": 1, "omega_distinct": 1, "omega_with_multiplicity": 1}


def fiber_values(f, g, H: int):
    """Support, values, majorant and a label for a(n) = sum_{g(m)=n} f(m), n < H."""
    H = int(H)
    m, gm = g.preimages_below(H)
    power = 1
    if isinstance(f, tuple):  # (table, k) stands for f(m)^k
        f, power = f
        if power < 0:
            raise InvalidInput("weight exponent must be >= 0")
    if isinstance(f, ArithTable):
        if m.size and int(m.max()) >= f.horizon:
            raise HorizonInsufficient(
                f"f table horizon {f.horizon} does not cover preimages up to {int(m.max())}",
                required=int(m.max()) + 1,
            )
        weights = f.values[m.astype(np.int64)] if m.size else np.zeros(0, dtype=np.int64)
        if power != 1:
            if weights.size and int(weights.max()).bit_length() * power > 62:
                raise OverflowPolicy("weights f(m)^k overflow 64-bit accumulation")
            weights = weights**power
        e_f = _GROWTH[f.function_id] * power
        fname = f.function_id if power == 1 else f"{f.function_id}^{power}"
        fmax = None if power else 1
    else:
        c = int(f)
        if c < 0:
            raise InvalidInput("f must be non-negative")
        weights = np.full(m.size, c, dtype=np.int64) if m.dtype != object else [c] * len(m)
        e_f, fname, fmax = 0, f"const:{c}", c
    if isinstance(g, PowerMap):
        # one preimage per n, f(m) <= m^e_f <= n^e_f
        C, D = (fmax if fmax is not None else 1), e_f
    elif g.function_id == "sigma":
        # m <= n for sigma(m) = n: at most n preimages, each f(m) <= n^e_f
        C, D = (fmax if fmax is not None else 1), 1 + e_f
    elif g.function_id == "phi":
        # phi(m) >= sqrt(m/2) gives m <= 2 n^2
        C = 2 * (fmax if fmax is not None else 2**e_f)
        D = 2 + 2 * e_f
    else:
        raise InvalidInput(f"unsupported index map {g.function_id}")
    if m.dtype == object:
        acc: dict = {}
        for mm, gg, w in zip(m.tolist(), gm.tolist(), list(weights)):
            if w:
                acc[int(gg)] = acc.get(int(gg), 0) + int(w)
        support = tuple(sorted(acc))
        vals = [acc[n] for n in support]
    else:
        dense = np.zeros(H, dtype=np.int64)
        np.add.at(dense, gm.astype(np.int64), np.asarray(weights, dtype=np.int64))
        support_arr = np.flatnonzero(dense)
        support = tuple(support_arr.tolist())
        vals = dense[support_arr].tolist()
    if C == 0:
        majorant = (Fraction(0), Fraction(1))
    elif D == 0:
        majorant = (Fraction(C), Fraction(1))
    else:
        majorant = (polynomial_majorant(C, D), FOLD_RATIO)
    return support, vals, majorant, f"fiber:{fname}:{g.function_id}"


def fiber_sequence(f, g, field: AlgebraicField, H: int) -> CoefficientSequence:
    """a(n) = sum of f(m) over the m with g(m) = n, for 1 <= n < H.

    ``f`` is a non-negative int constant or an :class:`ArithTable`; ``g`` is an
    :class:`ArithTable` for sigma or phi, or a :class:`PowerMap`.  The majorant
    is rigorous: the fibre size and f(m) are bounded by powers of n and the
    polynomial is folded into r = 1 + 2^-20.
    """
    support, vals, majorant, label = fiber_values(f, g, H)
    coords = tuple(_rational_coords(field, v) for v in vals)
    return CoefficientSequence(field, int(H), support, coords, majorant, True, label)


def add_sequences(a: CoefficientSequence, b: CoefficientSequence) -> CoefficientSequence:
    if a.field != b.field:
        raise InvalidInput("sequences live in different fields")
    H = min(a.horizon, b.horizon)
    acc: dict = {}
    for seq in (a, b):
        for n, c in zip(seq.support, seq.coords):
            if n < H:
                prev = acc.get(n)
                acc[n] = c if prev is None else tuple(x + y for x, y in zip(prev, c))
    items = sorted((n, c) for n, c in acc.items() if any(c))
    (Ma, ra), (Mb, rb) = a.majorant, b.majorant
    if H < max(a.horizon, b.horizon) and (Ma == 0 or Mb == 0):
        # stored coefficients past the common horizon need a majorant of their own
        extra = [h for s in (a, b) for h, n in zip(s.house_upper_values(), s.support) if n >= H]
        if extra:
            raise InvalidInput("adding sequences with different horizons needs positive majorants")
    return CoefficientSequence(
        a.field, H, tuple(n for n, _ in items), tuple(c for _, c in items),
        (Ma + Mb, max(ra, rb)), a.nonnegative and b.nonnegative, f"sum({a.source},{b.source})",
    )


def convolution_power(a: CoefficientSequence, j: int, H: int | None = None,
                      cap_bits: int | None = None) -> CoefficientSequence:
    """Coefficients of (sum a(n) X^n)^j below H, exactly."""
    j = int(j)
    if j < 1:
        raise InvalidInput("j must be a positive integer")
    if not a.is_rational_valued() or not a.nonnegative:
        raise InvalidInput("convolution powers need non-negative rational-integer coefficients")
    H = a.horizon if H is None else min(int(H), a.horizon)
    base = {n: c[0] for n, c in zip(a.support, a.coords) if n < H}
    result = dict(base)
    for _ in range(j - 1):
        nxt: dict = {}
        for n1, v1 in result.items():
            for n2, v2 in base.items():
                s = n1 + n2
                if s >= H:
                    continue
                nxt[s] = nxt.get(s, 0) + v1 * v2
        result = nxt
    if cap_bits is not None:
        for n, v in result.items():
            if v.bit_length() > cap_bits:
                raise OverflowPolicy(f"b_{j}({n}) has {v.bit_length()} bits, cap is {cap_bits}")
    M, r = a.majorant
    if M == 0:
        majorant = (Fraction(0), Fraction(1))
    elif j == 1:
        majorant = (M, r)
    else:
        # b_j(n) <= C(n-1, j-1) M^j r^n <= n^(j-1) M^j r^n
        majorant = (polynomial_majorant(M**j, j - 1), r * FOLD_RATIO)
        top = max(result.values(), default=0)
        if top > majorant[0]:
            majorant = (Fraction(top), majorant[1])
    support = tuple(sorted(result))
    coords = tuple(_rational_coords(a.field, result[n]) for n in support)
    return CoefficientSequence(a.field, H, support, coords, majorant, True, f"conv{j}({a.source})")


# ---------------------------------------------------------------------------
# tail sums in fixed point
# ---------------------------------------------------------------------------

def _q_lower(field: AlgebraicField) -> Fraction:
    lo, _ = field.principal_fixed(64)
    return Fraction(lo, 1 << 64)


def _log2_q_lower(field: AlgebraicField) -> float:
    return math.log2(float(_q_lower(field))) * (1 - 1e-9)


def _majorant_tail_fixed(seq: CoefficientSequence, N: int, W: int) -> int:
    """Upper bound, in units of 2^-W, of sum_{n >= max(N,H)} M r^n q^(N-n)."""
    M, r = seq.majorant
    if M == 0:
        return 0
    qlo = _q_lower(seq.field)
    if r >= qlo:
        raise MajorantTooWeak(f"majorant ratio r={float(r):.6g} is not below q={float(qlo):.6g}")
    ratio = r / qlo
    start = max(N, seq.horizon)
    rN = Interval(r).pow_rounded(N, 64).hi
    gap = Interval(ratio).pow_rounded(start - N, 64).hi
    T = M * rN * gap / (1 - ratio)
    return _ceil_fraction(T * (1 << W))


def _window_fixed(seq: CoefficientSequence, N: int, W: int, absolute: bool):
    """(lo, hi) in units of 2^-W enclosing sum_{n >= N} c(n) q^(N - n)."""
    field = seq.field
    lo_v, hi_v, suffix = seq._fixed(W, absolute)
    sup = seq.support
    idx = bisect_left(sup, N)
    nonneg = absolute or seq.nonnegative
    acc_lo = acc_hi = 0
    total = suffix[idx]
    if total:
        K = math.ceil(max(0, total.bit_length() - 4) / _log2_q_lower(field)) + 2
        plo, phi = field.inverse_powers_fixed(W, K)
        i = idx
        end = len(sup)
        while i < end and sup[i] - N < K:
            k = sup[i] - N
            a, b = lo_v[i], hi_v[i]
            pl, ph = plo[k], phi[k]
            if a >= 0:
                acc_lo += a * pl
                acc_hi += b * ph
            elif b <= 0:
                acc_lo += a * ph
                acc_hi += b * pl
            else:
                acc_lo += a * ph
                acc_hi += b * ph
            i += 1
        rest = suffix[i]
        if rest:
            bound = rest * phi[K]
            acc_hi += bound
            if not nonneg:
                acc_lo -= bound
    lo = acc_lo >> W
    hi = -((-acc_hi) >> W)
    T = _majorant_tail_fixed(seq, N, W)
    hi += T
    if not nonneg:
        lo -= T
    return lo, hi


def _resolve_bits(seq: CoefficientSequence, precision: int, extra: int = 0) -> int:
    return seq.working_bits(precision) + extra


def xi_tail(seq: CoefficientSequence, N: int, precision: int = 128, absolute: bool = False) -> Interval:
    """Enclosure of xi_N = sum_{j >= 0} c(N + j) / q^j (real embedding)."""
    N = int(N)
    if N < 0:
        raise InvalidInput("N must be >= 0")
    W = _resolve_bits(seq, precision)
    lo, hi = _window_fixed(seq, N, W, absolute)
    return Interval.from_fixed(lo, hi, W)


def _range_fixed(seq: CoefficientSequence, N0: int, N1: int, W: int, absolute: bool):
    """Lists lo, hi for N0 <= N < N1 via xi_N = c(N) + xi_{N+1} / q."""
    count = N1 - N0
    if count <= 0:
        return [], []
    lo_v, hi_v, _ = seq._fixed(W, absolute)
    sup = seq.support
    lo_out = [0] * count
    hi_out = [0] * count
    top_lo, top_hi = _window_fixed(seq, N1 - 1, W, absolute)
    lo_out[-1], hi_out[-1] = top_lo, top_hi
    ilo, ihi = seq.field.inverse_fixed(W)
    i = bisect_left(sup, N1 - 1) - 1
    cur_lo, cur_hi = top_lo, top_hi
    for N in range(N1 - 2, N0 - 1, -1):
        nl = (cur_lo * (ilo if cur_lo >= 0 else ihi)) >> W
        nh = -((-(cur_hi * (ihi if cur_hi >= 0 else ilo))) >> W)
        if i >= 0 and sup[i] == N:
            nl += lo_v[i]
            nh += hi_v[i]
            i -= 1
        cur_lo, cur_hi = nl, nh
        lo_out[N - N0] = nl
        hi_out[N - N0] = nh
    return lo_out, hi_out


def xi_tail_range(seq: CoefficientSequence, N0: int, N1: int, precision: int = 128,
                  absolute: bool = False) -> list:
    """Enclosures of xi_N for N0 <= N < N1 by backward recurrence."""
    W = _resolve_bits(seq, precision, 8)
    lo, hi = _range_fixed(seq, int(N0), int(N1), W, absolute)
    return [Interval.from_fixed(a, b, W) for a, b in zip(lo, hi)]


def xi_from_prefix(seq: CoefficientSequence, N: int, precision: int = 128) -> Interval:
    """q^N (xi - sum_{n<N} c(n) q^-n), computed through the full series value."""
    N = int(N)
    field = seq.field
    qhi_f = float(Fraction(field.principal_fixed(64)[1], 1 << 64))
    W = _resolve_bits(seq, precision) + math.ceil(N * math.log2(qhi_f)) + 16
    lo_v, hi_v, _ = seq._fixed(W, False)
    xlo, xhi = _window_fixed(seq, 0, W, False)
    sup = seq.support
    stop = bisect_left(sup, N)
    plo_tab, phi_tab = field.inverse_powers_fixed(W, max(N, 1))
    p_lo = p_hi = 0
    for i in range(stop):
        n = sup[i]
        a, b = lo_v[i], hi_v[i]
        pl, ph = plo_tab[n], phi_tab[n]
        if a >= 0:
            p_lo += a * pl
            p_hi += b * ph
        elif b <= 0:
            p_lo += a * ph
            p_hi += b * pl
        else:
            p_lo += a * ph
            p_hi += b * ph
    # difference in units of 2^-2W
    d_lo = (xlo << W) - p_hi
    d_hi = (xhi << W) - p_lo
    qlo, qhi = field.principal_fixed(W)
    if field.degree == 1:
        t = field.rational_base
        Q_lo = Q_hi = t**N
        scale = 0
    else:
        Q_lo, Q_hi = 1 << W, 1 << W
        for _ in range(N):
            Q_lo = (Q_lo * qlo) >> W
            Q_hi = -((-(Q_hi * qhi)) >> W)
        scale = W
    prods = (d_lo * Q_lo, d_lo * Q_hi, d_hi * Q_lo, d_hi * Q_hi)
    shift = 2 * W + scale - W
    lo = min(prods) >> shift
    hi = -((-max(prods)) >> shift)
    return Interval.from_fixed(lo, hi, W)


def xi_prefix_range(seq: CoefficientSequence, N1: int, precision: int = 128) -> list:
    """Enclosures of xi_N for 0 <= N < N1 from the full value, stepping
    xi_{N+1} = q (xi_N - c(N)) forward.

    Each step multiplies the width by about q, so the starting precision is
    raised by N1 log2 q bits.
    """
    N1 = int(N1)
    if N1 < 1:
        return []
    field = seq.field
    qhi_f = float(Fraction(field.principal_fixed(64)[1], 1 << 64))
    W = _resolve_bits(seq, precision) + math.ceil(N1 * math.log2(qhi_f)) + 16
    lo_v, hi_v, _ = seq._fixed(W, False)
    lo, hi = _window_fixed(seq, 0, W, False)
    qlo, qhi = field.principal_fixed(W)
    sup = seq.support
    i = 0
    out = []
    for N in range(N1):
        out.append(Interval.from_fixed(lo, hi, W))
        if i < len(sup) and sup[i] == N:
            lo, hi = lo - hi_v[i], hi - lo_v[i]
            i += 1
        # multiply [lo, hi] by [qlo, qhi] > 0
        a = lo * (qlo if lo >= 0 else qhi)
        b = hi * (qhi if hi >= 0 else qlo)
        lo, hi = a >> W, -((-b) >> W)
    return out


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailStats:
    x: Fraction
    z: Fraction
    eta: Fraction
    N_count: int
    S_value: Interval
    R_value: Interval

    def to_dict(self) -> dict:
        return {
            "x": rational_to_str(self.x),
            "z": rational_to_str(self.z),
            "eta": rational_to_str(self.eta),
            "N_count": self.N_count,
            "S": [rational_to_str(self.S_value.lo), rational_to_str(self.S_value.hi)],
            "R": [rational_to_str(self.R_value.lo), rational_to_str(self.R_value.hi)],
        }


def house_sum(seq: CoefficientSequence, x) -> Interval:
    """Enclosure of S(x) = sum_{n < x} house(c(n))."""
    k = seq.count_below(x)
    if seq.is_rational_valued():
        return Interval(sum(abs(c[0]) for c in seq.coords[:k]))
    vals = seq.house_values()[:k]
    lo = sum((v.lo for v in vals), Fraction(0))
    hi = sum((v.hi for v in vals), Fraction(0))
    return Interval(lo, hi)


def r_value_fixed(seq: CoefficientSequence, n_stop: int, j0: int, W: int):
    """(lo, hi) in units of 2^-W for sum_{1 <= n < n_stop} sum_{j >= j0} |c(n+j)| q^-j."""
    if n_stop <= 1:
        return 0, 0
    lo_l, hi_l = _range_fixed(seq, 1 + j0, n_stop + j0, W, True)
    s_lo, s_hi = sum(lo_l), sum(hi_l)
    if j0 == 0:
        return s_lo, s_hi
    plo, phi = seq.field.inverse_powers_fixed(W, j0)
    return (s_lo * plo[j0]) >> W, -((-(s_hi * phi[j0])) >> W)


def r_value(seq: CoefficientSequence, x, z, eta=Fraction(1), precision: int = 96) -> Interval:
    """Enclosure of R = sum_{1 <= n < eta x} sum_{j >= z} |c(n + j)| / q^j."""
    x, z, eta = as_fraction(x), as_fraction(z), as_fraction(eta)
    n_stop = _ceil_fraction(eta * x)
    j0 = max(0, _ceil_fraction(z))
    W = _resolve_bits(seq, precision, max(8, (n_stop).bit_length() + 8))
    lo, hi = r_value_fixed(seq, n_stop, j0, W)
    return Interval.from_fixed(max(lo, 0), hi, W)


def stats(seq: CoefficientSequence, x, z, eta=Fraction(1), precision: int = 96) -> TailStats:
    x, z, eta = as_fraction(x), as_fraction(z), as_fraction(eta)
    if x > seq.horizon:
        raise HorizonInsufficient(f"x={x} beyond sequence horizon {seq.horizon}",
                                  required=_ceil_fraction(x))
    if not 0 < eta <= 1:
        raise InvalidInput("eta must lie in (0, 1]")
    if z < 0:
        raise InvalidInput("z must be >= 0")
    return TailStats(x, z, eta, seq.count_below(x), house_sum(seq, x), r_value(seq, x, z, eta, precision))


# ---------------------------------------------------------------------------
# JSON lines exchange
# ---------------------------------------------------------------------------

def write_jsonl(seq: CoefficientSequence, path=None) -> str:
    M, r = seq.majorant
    lines = [json.dumps({
        "type": "header",
        "minpoly": list(seq.field.minpoly.coefficients),
        "horizon": seq.horizon,
        "majorant": [rational_to_str(M), rational_to_str(r)],
        "nonnegative": seq.nonnegative,
        "source": seq.source,
    }, sort_keys=True)]
    for n, c in zip(seq.support, seq.coords):
        lines.append(json.dumps({"n": n, "coords": list(c)}, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_jsonl(source, field: AlgebraicField | None = None) -> CoefficientSequence:
    text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not rows or rows[0].get("type") != "header":
        raise InvalidInput("sequence file must start with a header record")
    head = rows[0]
    if field is None:
        field = build_field(head["minpoly"])
    elif list(field.minpoly.coefficients) != list(head["minpoly"]):
        raise InvalidInput("sequence file belongs to a different field")
    items = sorted((int(r["n"]), tuple(int(v) for v in r["coords"])) for r in rows[1:])
    M, r = (Fraction(v) for v in head["majorant"])
    return CoefficientSequence(field, int(head["horizon"]), tuple(n for n, _ in items),
                               tuple(c for _, c in items), (M, r), bool(head.get("nonnegative", False)),
                               head.get("source", "explicit"))
