"""Closed real intervals with exact rational endpoints.

Arithmetic on :class:`Interval` is exact (``fractions.Fraction`` endpoints);
callers bound the growth of numerators and denominators with
:meth:`Interval.round_out`, which rounds outward to a given number of
significant bits.  Elementary functions (``log``, ``exp``) go through
mpmath's low-level routines with directed rounding and are then widened by a
few ulps, so every returned interval encloses the true value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from numbers import Rational

from mpmath import libmp

from .errors import InvalidInput

__all__ = [
    "Interval",
    "ComplexBox",
    "as_fraction",
    "round_down",
    "round_up",
    "log_interval",
    "exp_interval",
    "rational_to_str",
    "parse_rational",
]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are exact binary rationals; accepted but never produced here
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def _scaled(v: Fraction, prec: int):
    n, d = v.numerator, v.denominator
    e = abs(n).bit_length() - d.bit_length()
    return n, d, prec - e


def round_down(v: Fraction, prec: int) -> Fraction:
    """Largest dyadic with about ``prec`` significant bits that is <= v."""
    if v == 0:
        return v
    n, d, shift = _scaled(v, prec)
    if shift >= 0:
        return Fraction((n << shift) // d, 1 << shift)
    return Fraction((n // (d << -shift)) << -shift)


def round_up(v: Fraction, prec: int) -> Fraction:
    if v == 0:
        return v
    return -round_down(-v, prec)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __init__(self, lo, hi=None):
        lo = as_fraction(lo)
        hi = lo if hi is None else as_fraction(hi)
        if lo > hi:
            raise InvalidInput(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_fixed(cls, lo: int, hi: int, bits: int) -> "Interval":
        """Interval [lo, hi] * 2^-bits from fixed-point integer bounds."""
        den = 1 << bits
        return cls(Fraction(lo, den), Fraction(hi, den))

    # -- basic properties --------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersection(self, other: "Interval") -> "Interval":
        if not self.intersects(other):
            raise InvalidInput("intervals are disjoint")
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    # certain comparisons: True only when every point of self satisfies it
    def certainly_lt(self, other) -> bool:
        other = _coerce(other)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = _coerce(other)
        return self.hi <= other.lo

    def certainly_gt(self, other) -> bool:
        return _coerce(other).certainly_lt(self)

    def certainly_ge(self, other) -> bool:
        return _coerce(other).certainly_le(self)

    def certainly_positive(self) -> bool:
        return self.lo > 0

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) - self

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        if self.lo >= 0 and other.lo >= 0:
            return Interval(self.lo * other.lo, self.hi * other.hi)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "Interval":
        return self * _coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) * self.reciprocal()

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise InvalidInput("only non-negative integer powers are supported")
        if n == 0:
            return Interval(1)
        if n % 2 == 1 or self.lo >= 0:
            return Interval(self.lo**n, self.hi**n)
        if self.hi <= 0:
            return Interval(self.hi**n, self.lo**n)
        return Interval(0, max(-self.lo, self.hi) ** n)

    def pow_rounded(self, n: int, prec: int) -> "Interval":
        """Power by repeated squaring, rounding outward after every step."""
        if n < 0:
            raise InvalidInput("negative power")
        result = Interval(1)
        base = self
        while n:
            if n & 1:
                result = (result * base).round_out(prec)
            n >>= 1
            if n:
                base = (base * base if base.lo >= 0 else base**2).round_out(prec)
        return result

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi))

    def max(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    # -- rounding ---------------------------------------------------------
    def round_out(self, prec: int) -> "Interval":
        """Outward rounding to ``prec`` significant bits per endpoint."""
        return Interval(round_down(self.lo, prec), round_up(self.hi, prec))

    def round_abs(self, bits: int) -> "Interval":
        """Outward rounding onto the grid 2^-bits."""
        den = 1 << bits
        lo = Fraction((self.lo.numerator * den) // self.lo.denominator, den)
        hi = Fraction(-((-self.hi.numerator * den) // self.hi.denominator), den)
        return Interval(lo, hi)

    def sqrt(self, prec: int = 128) -> "Interval":
        if self.lo < 0:
            raise InvalidInput("square root of a negative interval")
        return Interval(_sqrt_down(self.lo, prec), _sqrt_up(self.hi, prec))

    def __repr__(self) -> str:
        if self.is_point:
            return f"Interval({self.lo})"
        return f"Interval([{float(self.lo):.17g}, {float(self.hi):.17g}])"


def _coerce(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(x)


def _sqrt_down(v: Fraction, prec: int) -> Fraction:
    if v == 0:
        return v
    n, d = v.numerator, v.denominator
    k = max(0, prec - (n.bit_length() - d.bit_length()) // 2 + 2)
    return Fraction(isqrt((n << (2 * k)) // d), 1 << k)


def _sqrt_up(v: Fraction, prec: int) -> Fraction:
    if v == 0:
        return v
    n, d = v.numerator, v.denominator
    k = max(0, prec - (n.bit_length() - d.bit_length()) // 2 + 2)
    scaled = -((-(n << (2 * k))) // d)  # ceil
    r = isqrt(scaled)
    if r * r < scaled:
        r += 1
    return Fraction(r, 1 << k)


@dataclass(frozen=True)
class ComplexBox:
    """Axis-aligned rectangle re x im in the complex plane."""

    re: Interval
    im: Interval

    @classmethod
    def point(cls, re, im=0) -> "ComplexBox":
        return cls(Interval(re), Interval(im))

    def __add__(self, other) -> "ComplexBox":
        other = _coerce_box(other)
        return ComplexBox(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "ComplexBox":
        other = _coerce_box(other)
        return ComplexBox(self.re - other.re, self.im - other.im)

    def __mul__(self, other) -> "ComplexBox":
        other = _coerce_box(other)
        return ComplexBox(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def round_out(self, prec: int) -> "ComplexBox":
        return ComplexBox(self.re.round_out(prec), self.im.round_out(prec))

    def abs_squared(self) -> Interval:
        return self.re**2 + self.im**2

    def modulus(self, prec: int = 128) -> Interval:
        return self.abs_squared().sqrt(prec)

    def contains(self, re, im=0) -> bool:
        return self.re.contains(re) and self.im.contains(im)

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)


def _coerce_box(x) -> ComplexBox:
    if isinstance(x, ComplexBox):
        return x
    if isinstance(x, Interval):
        return ComplexBox(x, Interval(0))
    return ComplexBox.point(x)


# -- elementary functions -------------------------------------------------

def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x
    man = int(man)
    if sign:
        man = -man
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def _widen(lo: Fraction, hi: Fraction, prec: int) -> Interval:
    slack_lo = abs(lo) / (1 << (prec - 3)) if lo else Fraction(0)
    slack_hi = abs(hi) / (1 << (prec - 3)) if hi else Fraction(0)
    return Interval(lo - slack_lo, hi + slack_hi)


def log_interval(x, prec: int = 128) -> Interval:
    """Enclosure of the natural logarithm of a positive interval."""
    x = _coerce(x)
    if x.lo <= 0:
        raise InvalidInput("logarithm of a non-positive interval")
    work = prec + 20
    lo = libmp.from_rational(x.lo.numerator, x.lo.denominator, work, libmp.round_floor)
    hi = libmp.from_rational(x.hi.numerator, x.hi.denominator, work, libmp.round_ceiling)
    lo = _mpf_to_fraction(libmp.mpf_log(lo, work, libmp.round_floor))
    hi = _mpf_to_fraction(libmp.mpf_log(hi, work, libmp.round_ceiling))
    tiny = Fraction(1, 1 << work)
    out = _widen(lo, hi, work)
    return Interval(out.lo - tiny, out.hi + tiny).round_out(prec)


def exp_interval(x, prec: int = 128) -> Interval:
    x = _coerce(x)
    work = prec + 20
    lo = libmp.from_rational(x.lo.numerator, x.lo.denominator, work, libmp.round_floor)
    hi = libmp.from_rational(x.hi.numerator, x.hi.denominator, work, libmp.round_ceiling)
    lo = _mpf_to_fraction(libmp.mpf_exp(lo, work, libmp.round_floor))
    hi = _mpf_to_fraction(libmp.mpf_exp(hi, work, libmp.round_ceiling))
    out = _widen(lo, hi, work)
    return Interval(max(Fraction(0), out.lo), out.hi).round_out(prec)


# -- exact text forms -----------------------------------------------------

def rational_to_str(x) -> str:
    """Exact text for a rational: a terminating decimal when one exists, else p/q."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = (d & -d).bit_length() - 1
    rest = d >> twos
    fives = 0
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{x.numerator}/{x.denominator}"
    k = max(twos, fives)
    scaled = abs(x.numerator) * (10**k // d)
    digits = str(scaled).rjust(k + 1, "0")
    text = f"{digits[:-k]}.{digits[-k:]}".rstrip("0").rstrip(".")
    return "-" + text if x < 0 else text


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())
