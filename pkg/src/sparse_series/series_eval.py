"""Values of sum (a(n) + b(n)) / q^n and base-t digit expansions of fibre series."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebraic import AlgebraicField
from .errors import InvalidInput, RefinementBudgetExceeded
from .intervals import Interval, exp_interval, log_interval
from .sequences import (
    CoefficientSequence,
    _majorant_tail_fixed,
    _window_fixed,
    add_sequences,
    fiber_values,
)

__all__ = [
    "evaluate_series",
    "DigitStream",
    "digit_stream",
    "nonzero_digit_density",
    "DensityRow",
]

DIGIT_GUARD = 64


def evaluate_series(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence | None = None,
                    precision: int = 128) -> Interval:
    """Enclosure of sum_{n >= 1} (a(n) + b(n)) / q^n in the real embedding.

    The width reaches 2^-precision unless the tail majorant beyond the stored
    horizon is itself wider; in that case the majorant-limited enclosure is
    returned as is.
    """
    if a.field != field or (b is not None and b.field != field):
        raise InvalidInput("sequences must live in the given field")
    c = a if b is None else add_sequences(a, b)
    target = Fraction(1, 1 << precision)
    W = c.working_bits(precision)
    for _ in range(4):
        lo, hi = _window_fixed(c, 0, W, False)
        out = Interval.from_fixed(lo, hi, W)
        if out.width <= target:
            return out
        tail = Fraction(_majorant_tail_fixed(c, 0, W), 1 << W)
        if 2 * tail >= target:
            return out
        W *= 2
    raise RefinementBudgetExceeded(f"series enclosure did not reach width 2^-{precision}")


@dataclass(frozen=True, eq=False)
class DigitStream:
    base: int
    P: int
    digits: np.ndarray = field(repr=False)  # digits[p] for 1 <= p <= P; digits[0] unused
    carry_overflow: int  # integer part produced by carries out of position 1
    carries: int  # positions that received a nonzero incoming carry
    reliable_limit: int  # digits 1..reliable_limit are certain
    nonzero_positions: tuple = field(repr=False)

    def __post_init__(self):
        self.digits.setflags(write=False)

    def count_below(self, x) -> int:
        return bisect_left(self.nonzero_positions, math.ceil(x))

    def value_lower(self) -> Fraction:
        """The truncated value carry_overflow + sum digits[p] t^-p."""
        t = self.base
        acc = Fraction(self.carry_overflow)
        for p in self.nonzero_positions:
            acc += Fraction(int(self.digits[p]), t**p)
        return acc

    def to_rle(self) -> str:
        lines = [f"# base={self.base} P={self.P} reliable_limit={self.reliable_limit} "
                 f"carry_overflow={self.carry_overflow}"]
        lines += [f"{p}:{int(self.digits[p])}" for p in self.nonzero_positions]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_rle(cls, text: str) -> "DigitStream":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise InvalidInput("digit stream text must start with a header line")
        head = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        t, P = int(head["base"]), int(head["P"])
        digits = np.zeros(P + 1, dtype=np.int64)
        pos = []
        for ln in lines[1:]:
            p, v = ln.split(":")
            digits[int(p)] = int(v)
            pos.append(int(p))
        return cls(t, P, digits, int(head.get("carry_overflow", 0)), 0, int(head["reliable_limit"]), tuple(pos))


def _propagate(values: dict, top: int, t: int, extra: int = 0):
    """Digits of sum values[p] t^-p over 1 <= p <= top, plus extra units at top."""
    digits = {}
    carries = 0
    positions = sorted((p for p in values if 1 <= p <= top), reverse=True)
    k = 0
    carry = extra
    p = top
    while p > 0:
        if carry == 0:
            while k < len(positions) and positions[k] > p:
                k += 1
            if k == len(positions):
                break
            p = positions[k]
        else:
            carries += 1
        v = values.get(p, 0) + carry
        if v % t:
            digits[p] = v % t
        carry = v // t
        p -= 1
    return digits, carry, carries


def digit_stream(f, g, t: int, P: int, guard: int = DIGIT_GUARD) -> DigitStream:
    """Base-t digits of sum_m f(m) t^-g(m) at positions 1..P.

    Coefficients are gathered exactly up to P + guard.  The discarded tail is
    bounded through the fibre majorant, and the expansion is computed twice,
    once with the tail at zero and once at its upper bound; digits up to the
    first disagreement are certain.
    """
    t, P = int(t), int(P)
    if t < 2:
        raise InvalidInput("base must be >= 2")
    if P < 1:
        raise InvalidInput("P must be >= 1")
    top = P + int(guard)
    support, vals, (M, r), _ = fiber_values(f, g, top + 1)
    values = dict(zip(support, vals))
    # tail beyond `top`, in units of t^-top: sum_{j>=1} M r^(top+j) t^-j
    if M == 0:
        tail_units = 0
    else:
        if r >= t:
            raise InvalidInput("fibre majorant does not converge in this base")
        rt = Interval(r).pow_rounded(top + 1, 64).hi
        bound = M * rt / t / (1 - r / t)
        tail_units = -((-bound.numerator) // bound.denominator)
    low, carry_low, carries = _propagate(values, top, t)
    if tail_units:
        high, carry_high, _ = _propagate(values, top, t, tail_units)
    else:
        high, carry_high = low, carry_low
    reliable = P
    if carry_high != carry_low:
        reliable = 0
    else:
        diff = [p for p in set(low) | set(high) if low.get(p) != high.get(p)]
        if diff:
            reliable = min(P, min(diff) - 1)
    digits = np.zeros(P + 1, dtype=np.int64)
    nz = sorted(p for p in low if p <= P)
    for p in nz:
        digits[p] = low[p]
    return DigitStream(t, P, digits, carry_low, carries, reliable, tuple(nz))


@dataclass(frozen=True)
class DensityRow:
    x: int
    count: int
    normalized: Interval | None  # count * (log x / x)^(1/ell)


def nonzero_digit_density(stream: DigitStream, ell: int, checkpoints=None) -> list:
    """Cumulative nonzero-digit counts below each checkpoint, with the
    normalisation count * (log x / x)^(1/ell)."""
    ell = int(ell)
    if ell < 1:
        raise InvalidInput("ell must be >= 1")
    if checkpoints is None:
        checkpoints = []
        x = 10
        while x <= stream.P:
            checkpoints.append(x)
            x *= 10
        if not checkpoints or checkpoints[-1] != stream.P:
            checkpoints.append(stream.P)
    rows = []
    for x in checkpoints:
        x = int(x)
        count = stream.count_below(x)
        if x < 3:
            rows.append(DensityRow(x, count, None))
            continue
        lx = log_interval(x, 80)
        scale = exp_interval((log_interval(lx, 80) - log_interval(x, 80)) / ell, 80)
        rows.append(DensityRow(x, count, (scale * count).round_out(64)))
    return rows
