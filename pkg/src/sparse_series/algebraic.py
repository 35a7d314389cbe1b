"""Exact arithmetic in Z[q] for a real algebraic integer q > 1.

A field is described by the monic minimal polynomial of q together with
certified inclusion discs for all of its complex roots.  The discs come from
high-precision approximations (mpmath ``polyroots``) validated with the
Gerschgorin-type bound of Smith: for a monic polynomial p of degree d with
distinct approximations z_1..z_d the disc

    |z - z_i| <= d * |p(z_i)| / prod_{j != i} |z_i - z_j|

contains a root, and pairwise disjoint discs each contain exactly one.  All
validation is done in exact rational arithmetic.

Elements are integer coordinate vectors in the power basis 1, q, ..., q^(d-1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .errors import (
    InvalidInput,
    NoRealRootAboveOne,
    RefinementBudgetExceeded,
    ReducibleRejected,
)
from .intervals import ComplexBox, Interval, _mpf_to_fraction, _sqrt_down, _sqrt_up, round_down

__all__ = [
    "MonicIntPolynomial",
    "parse_polynomial",
    "RootDisc",
    "BaseClassification",
    "AlgebraicField",
    "FieldElement",
    "build_field",
    "classify_base",
    "element_arith",
    "house",
    "field_norm",
    "embed",
    "PISOT",
    "SALEM",
    "NEITHER",
    "UNDECIDED",
]

PISOT = "Pisot"
SALEM = "Salem"
NEITHER = "NeitherPisotNorSalem"
UNDECIDED = "Undecided"

DEFAULT_PRECISION = 128
DEFAULT_DOUBLINGS = 8


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonicIntPolynomial:
    """Monic integer polynomial, coefficients listed from the constant term up."""

    coefficients: tuple

    def __init__(self, coefficients: Sequence[int]):
        coeffs = tuple(coefficients)
        if len(coeffs) < 2:
            raise InvalidInput("polynomial must have degree at least 1")
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise InvalidInput(f"coefficient {c!r} is not an integer")
        if coeffs[-1] != 1:
            raise InvalidInput("polynomial must be monic (leading coefficient 1)")
        object.__setattr__(self, "coefficients", tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def is_self_reciprocal(self) -> bool:
        c = self.coefficients
        return c == c[::-1]

    def sign_at_dyadic(self, m: int, k: int) -> int:
        """Sign of p(m / 2^k), computed with integers only."""
        acc = 0
        for i, c in enumerate(reversed(self.coefficients)):
            # Horner on the homogenized form sum c_i m^i 2^{k(d-i)}
            acc = acc * m + (c << (k * i))
        return (acc > 0) - (acc < 0)

    def to_text(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_text()


_X = sympy.Symbol("x")
_TRANSFORMS = standard_transformations + (implicit_multiplication_application, convert_xor)
_LIST_RE = re.compile(r"^\s*[-+]?\d+(\s*,\s*[-+]?\d+)+\s*$")


def parse_polynomial(text) -> MonicIntPolynomial:
    """Parse "c0,c1,...,cd" or an expression in x such as "x^2-2x-1"."""
    if isinstance(text, MonicIntPolynomial):
        return text
    if isinstance(text, (list, tuple)):
        return MonicIntPolynomial([int(c) for c in text])
    text = str(text).strip()
    if _LIST_RE.match(text):
        return MonicIntPolynomial([int(t) for t in text.split(",")])
    if not re.fullmatch(r"[0-9x+\-*^ ()]+", text):
        raise InvalidInput(f"cannot parse polynomial {text!r}")
    try:
        expr = parse_expr(text, local_dict={"x": _X}, transformations=_TRANSFORMS)
        poly = sympy.Poly(expr, _X)
    except Exception as exc:  # sympy raises a zoo of types here
        raise InvalidInput(f"cannot parse polynomial {text!r}: {exc}") from None
    if poly.domain != sympy.ZZ:
        raise InvalidInput(f"polynomial {text!r} must have integer coefficients")
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return MonicIntPolynomial(coeffs)


# ---------------------------------------------------------------------------
# root isolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootDisc:
    """Closed disc |z - (re + i*im)| <= radius holding exactly one root."""

    re: Fraction
    im: Fraction
    radius: Fraction

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def box(self) -> ComplexBox:
        r = self.radius
        return ComplexBox(Interval(self.re - r, self.re + r), Interval(self.im - r, self.im + r))

    def real_interval(self) -> Interval:
        return Interval(self.re - self.radius, self.re + self.radius)

    def modulus(self, prec: int = 96) -> Interval:
        c2 = self.re * self.re + self.im * self.im
        lo = _sqrt_down(c2, prec) - self.radius
        hi = _sqrt_up(c2, prec) + self.radius
        return Interval(max(lo, Fraction(0)), hi)

    def modulus_below(self, bound: Fraction) -> bool:
        """Certify |z| < bound for every z in the disc."""
        gap = bound - self.radius
        return gap > 0 and self.re * self.re + self.im * self.im < gap * gap

    def modulus_above(self, bound: Fraction) -> bool:
        s = bound + self.radius
        return self.re * self.re + self.im * self.im > s * s


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _peval(coeffs, z):
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        acc = _cmul(acc, z)
        acc = (acc[0] + c, acc[1])
    return acc


def _approximate_roots(poly: MonicIntPolynomial, bits: int):
    ctx = mpmath.MPContext()
    ctx.prec = bits + 16
    try:
        roots = ctx.polyroots(
            list(reversed(poly.coefficients)), maxsteps=50 + 4 * poly.degree + bits // 4,
            extraprec=bits + 32,
        )
    except ctx.NoConvergence:
        return None
    out = []
    for r in roots:
        z = ctx.mpc(r)
        out.append((_mpf_to_fraction(z.real._mpf_), _mpf_to_fraction(z.imag._mpf_)))
    return out


def isolate_roots(poly: MonicIntPolynomial, bits: int):
    """Certified disjoint discs for every root, or None when ``bits`` is not enough."""
    d = poly.degree
    if d == 1:
        return (RootDisc(Fraction(-poly.coefficients[0]), Fraction(0), Fraction(0)),)
    approx = _approximate_roots(poly, bits)
    if approx is None:
        return None
    snap = Fraction(1, 1 << max(8, bits // 2))
    reals, uppers, lowers = [], [], []
    for re_, im_ in approx:
        re_ = round_down(re_, bits) if re_ else re_
        if abs(im_) <= snap * max(1, abs(re_)):
            reals.append((re_, Fraction(0)))
        elif im_ > 0:
            uppers.append((re_, round_down(im_, bits)))
        else:
            lowers.append((re_, im_))
    if len(uppers) != len(lowers):
        return None
    # conjugate pairs are made exact mirrors of each other
    centers = sorted(reals) + [c for u in sorted(uppers) for c in (u, (u[0], -u[1]))]
    coeffs = poly.coefficients
    d2 = Fraction(d * d)
    radii = []
    for i, zi in enumerate(centers):
        val = _peval(coeffs, zi)
        num = val[0] * val[0] + val[1] * val[1]
        if num == 0:
            radii.append(Fraction(0))
            continue
        den = Fraction(1)
        for j, zj in enumerate(centers):
            if j != i:
                dre, dim = zi[0] - zj[0], zi[1] - zj[1]
                den *= dre * dre + dim * dim
        if den == 0:
            return None
        radii.append(_sqrt_up(d2 * num / den, 64))
    for i in range(d):
        for j in range(i + 1, d):
            dre = centers[i][0] - centers[j][0]
            dim = centers[i][1] - centers[j][1]
            s = radii[i] + radii[j]
            if dre * dre + dim * dim <= s * s:
                return None
    # disjointness from the mirror disc certifies non-real roots off the axis
    return tuple(RootDisc(c[0], c[1], r) for c, r in zip(centers, radii))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BaseClassification:
    kind: str
    margin: Interval | None = None

    def to_dict(self) -> dict:
        from .intervals import rational_to_str

        out = {"kind": self.kind}
        if self.margin is not None:
            out["margin"] = [rational_to_str(self.margin.lo), rational_to_str(self.margin.hi)]
        return out


def _dickson_trace_polynomial(poly: MonicIntPolynomial):
    """T with p(x) = x^m T(x + 1/x) for a self-reciprocal p of degree 2m."""
    c = list(poly.coefficients)
    m = poly.degree // 2
    y = _X
    dick = [sympy.Integer(2), y]
    for _ in range(2, m + 1):
        dick.append(sympy.expand(y * dick[-1] - dick[-2]))
    expr = c[m]
    for k in range(1, m + 1):
        expr += c[m + k] * dick[k]
    return sympy.Poly(sympy.expand(expr), y)


def _salem_by_trace(poly: MonicIntPolynomial) -> bool:
    if poly.degree < 4 or poly.degree % 2 or not poly.is_self_reciprocal():
        return False
    T = _dickson_trace_polynomial(poly)
    m = T.degree()
    above = T.count_roots(2, None) - (1 if T.eval(2) == 0 else 0)
    inside = T.count_roots(-2, 2) - (1 if T.eval(2) == 0 else 0) - (1 if T.eval(-2) == 0 else 0)
    # one trace root above 2 gives q, 1/q; the others in (-2, 2) give unit-circle pairs
    return above == 1 and inside == m - 1


def _classify_discs(poly: MonicIntPolynomial, discs, principal: int) -> BaseClassification:
    one = Fraction(1)
    others = [disc for i, disc in enumerate(discs) if i != principal]
    if not others:
        return BaseClassification(PISOT, None)
    if all(disc.modulus_below(one) for disc in others):
        mods = [disc.modulus() for disc in others]
        top = reduce(lambda a, b: a.max(b), mods)
        return BaseClassification(PISOT, Interval(1 - top.hi, 1 - top.lo))
    if any(disc.modulus_above(one) for disc in others):
        mods = [disc.modulus() for disc in others]
        top = reduce(lambda a, b: a.max(b), mods)
        return BaseClassification(NEITHER, Interval(top.lo - 1, top.hi - 1))
    if poly.is_self_reciprocal():
        if _salem_by_trace(poly):
            return BaseClassification(SALEM, Interval(0))
        return BaseClassification(NEITHER, None)
    return BaseClassification(UNDECIDED, None)


# ---------------------------------------------------------------------------
# fields and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    coords: tuple

    def __init__(self, coords: Sequence[int]):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class AlgebraicField:
    minpoly: MonicIntPolynomial
    roots: tuple
    principal_index: int
    classification: BaseClassification
    precision: int = DEFAULT_PRECISION
    max_doublings: int = DEFAULT_DOUBLINGS
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, AlgebraicField) and other.minpoly == self.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def rational_base(self) -> int | None:
        return -self.minpoly.coefficients[0] if self.degree == 1 else None

    # -- construction of elements --------------------------------------
    def element(self, coords: Sequence[int]) -> FieldElement:
        coords = list(coords)
        if len(coords) > self.degree:
            return FieldElement(self._reduce(coords))
        return FieldElement(coords + [0] * (self.degree - len(coords)))

    def from_int(self, n: int) -> FieldElement:
        return FieldElement([n] + [0] * (self.degree - 1))

    def zero(self) -> FieldElement:
        return self.from_int(0)

    def one(self) -> FieldElement:
        return self.from_int(1)

    def gen(self) -> FieldElement:
        if self.degree == 1:
            return self.from_int(self.rational_base)
        return FieldElement([0, 1] + [0] * (self.degree - 2))

    def check(self, x: FieldElement) -> FieldElement:
        if not isinstance(x, FieldElement):
            x = FieldElement(x)
        if len(x.coords) != self.degree:
            raise InvalidInput(f"element has {len(x.coords)} coordinates, field degree is {self.degree}")
        return x

    # -- ring operations -----------------------------------------------
    def _reduce(self, prod: list) -> tuple:
        c = self.minpoly.coefficients
        d = self.degree
        prod = list(prod)
        for k in range(len(prod) - 1, d - 1, -1):
            lead = prod[k]
            if lead:
                base = k - d
                for i in range(d):
                    prod[base + i] -= lead * c[i]
            prod[k] = 0
        return tuple(prod[:d]) + (0,) * max(0, d - len(prod))

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return FieldElement([a + b for a, b in zip(x.coords, y.coords)])

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return FieldElement([a - b for a, b in zip(x.coords, y.coords)])

    def neg(self, x: FieldElement) -> FieldElement:
        return FieldElement([-a for a in x.coords])

    def scale(self, x: FieldElement, k: int) -> FieldElement:
        return FieldElement([k * a for a in x.coords])

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        d = self.degree
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(x.coords):
            if a:
                for j, b in enumerate(y.coords):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(self._reduce(prod))

    def pow(self, x: FieldElement, n: int) -> FieldElement:
        if n < 0:
            raise InvalidInput("negative powers are not available in Z[q]")
        result, base = self.one(), x
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    # -- exact norm ----------------------------------------------------
    def norm(self, x: FieldElement) -> int:
        x = self.check(x)
        if x.is_zero():
            return 0
        d = self.degree
        cols = []
        v = x
        q = FieldElement([0, 1] + [0] * (d - 2)) if d > 1 else None
        for k in range(d):
            cols.append(v.coords)
            if k + 1 < d:
                v = self.mul(v, q)
        matrix = [[cols[j][i] for j in range(d)] for i in range(d)]
        return _bareiss_det(matrix)

    # -- root enclosures -----------------------------------------------
    def discs(self, bits: int):
        """Certified discs at working precision >= bits (principal first unchanged)."""
        key = ("discs", bits)
        if key in self._cache:
            return self._cache[key]
        if bits <= self.precision:
            found = self.roots
        else:
            found = None
            b = bits
            for _ in range(self.max_doublings + 1):
                found = isolate_roots(self.minpoly, b)
                if found is not None:
                    break
                b *= 2
            if found is None:
                raise RefinementBudgetExceeded(f"root isolation failed at {b // 2} bits")
            found = _align(self.roots, found)
        self._cache[key] = found
        return found

    def principal_fixed(self, bits: int) -> tuple[int, int]:
        """Integers (L, U) with L <= q * 2^bits <= U and U - L <= 2."""
        key = ("qfix", bits)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.degree == 1:
            v = self.rational_base << bits
            out = (v, v)
        else:
            out = self._refine_principal(bits)
        self._cache[key] = out
        return out

    def _refine_principal(self, bits: int) -> tuple[int, int]:
        disc = self.roots[self.principal_index]
        iv = disc.real_interval()
        poly = self.minpoly
        ctx = mpmath.MPContext()
        ctx.prec = bits + 32
        coeffs = list(reversed(poly.coefficients))
        lo_lim = iv.lo * (1 << bits)
        hi_lim = iv.hi * (1 << bits)
        try:
            x = ctx.mpf(disc.re.numerator) / disc.re.denominator
            for _ in range(bits.bit_length() + 8):
                x = x - ctx.polyval(coeffs, x) / ctx.polyval(coeffs, x, derivative=True)[1]
            guess = int(ctx.floor(x * ctx.mpf(2) ** bits))
        except Exception:
            guess = int(disc.re * (1 << bits))
        s_lo = poly.sign_at_dyadic(guess - 1, bits)
        s_hi = poly.sign_at_dyadic(guess + 1, bits)
        if s_lo * s_hi < 0 and lo_lim <= guess - 1 and guess + 1 <= hi_lim:
            return guess - 1, guess + 1
        if s_lo == 0:
            return guess - 1, guess - 1
        if s_hi == 0:
            return guess + 1, guess + 1
        # fall back on bisection inside the isolating interval; grid points
        # strictly between floor(lo) and ceil(hi) lie inside the disc
        lo = (iv.lo.numerator << bits) // iv.lo.denominator
        hi = -((-iv.hi.numerator << bits) // iv.hi.denominator)
        slo = poly(iv.lo)
        slo = (slo > 0) - (slo < 0)
        if slo == 0:
            v = iv.lo * (1 << bits)
            return v.numerator // v.denominator, -((-v.numerator) // v.denominator)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            sm = poly.sign_at_dyadic(mid, bits)
            if sm == 0:
                return mid, mid
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return lo, hi

    def principal_interval(self, bits: int = 128) -> Interval:
        lo, hi = self.principal_fixed(bits)
        return Interval.from_fixed(lo, hi, bits)

    def inverse_fixed(self, bits: int) -> tuple[int, int]:
        """Integers (L, U) with L <= 2^bits / q <= U."""
        key = ("qinv", bits)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.degree == 1:
            t = self.rational_base
            out = ((1 << bits) // t, -((-(1 << bits)) // t))
        else:
            b2 = bits + 8
            lo, hi = self.principal_fixed(b2)
            num = 1 << (bits + b2)
            out = (num // hi, -((-num) // lo))
        self._cache[key] = out
        return out

    def inverse_powers_fixed(self, bits: int, kmax: int):
        """Lists lo, hi with lo[k] <= 2^bits q^-k <= hi[k] for 0 <= k <= kmax."""
        key = ("invpow", bits)
        table = self._cache.get(key)
        if table is not None and len(table[0]) > kmax:
            return table
        guard = 2 * (kmax + 1).bit_length() + 8
        wb = bits + guard
        ilo, ihi = self.inverse_fixed(wb)
        lo = [1 << wb]
        hi = [1 << wb]
        for _ in range(kmax):
            lo.append((lo[-1] * ilo) >> wb)
            hi.append(-((-(hi[-1] * ihi)) >> wb))
        out_lo = [v >> guard for v in lo]
        out_hi = [-((-v) >> guard) for v in hi]
        table = (out_lo, out_hi)
        self._cache[key] = table
        return table

    def eval_fixed(self, x: FieldElement, bits: int) -> tuple[int, int]:
        """Integers (L, U) enclosing 2^bits times the principal value of x."""
        x = self.check(x)
        if x.is_rational():
            v = x.coords[0] << bits
            return v, v
        d = self.degree
        qlo, qhi = self.principal_fixed(bits)
        guard = max(abs(c) for c in x.coords).bit_length() + d * (qhi.bit_length() - bits + 2) + 8
        wb = bits + guard
        qlo, qhi = self.principal_fixed(wb)
        plo, phi = 1 << wb, 1 << wb
        acc_lo = acc_hi = 0
        for i, c in enumerate(x.coords):
            if i:
                plo = (plo * qlo) >> wb
                phi = -((-(phi * qhi)) >> wb)
            if c > 0:
                acc_lo += c * plo
                acc_hi += c * phi
            elif c < 0:
                acc_lo += c * phi
                acc_hi += c * plo
        return acc_lo >> guard, -((-acc_hi) >> guard)

    def principal_value(self, x: FieldElement, bits: int = 128) -> Interval:
        lo, hi = self.eval_fixed(x, bits)
        return Interval.from_fixed(lo, hi, bits)

    def embed(self, x: FieldElement, index: int, precision: int = 64) -> ComplexBox:
        x = self.check(x)
        if not 0 <= index < self.degree:
            raise InvalidInput(f"conjugate index {index} out of range 0..{self.degree - 1}")
        if x.is_rational():
            return ComplexBox.point(x.coords[0])
        target = Fraction(1, 1 << precision)
        if index == self.principal_index:
            bits = precision + 8
            for _ in range(self.max_doublings + 1):
                val = self.principal_value(x, bits)
                if val.width <= target:
                    return ComplexBox(val, Interval(0))
                bits *= 2
            raise RefinementBudgetExceeded("principal embedding did not reach target width")
        size = max(abs(c) for c in x.coords).bit_length()
        bits = max(self.precision, 2 * (precision + size + 8 * self.degree))
        for _ in range(self.max_doublings + 1):
            disc = self.discs(bits)[index]
            box = _horner_box(x.coords, disc.box(), bits + 16)
            if box.width <= target:
                if disc.is_real:
                    box = ComplexBox(box.re, Interval(0))
                return box
            bits *= 2
        raise RefinementBudgetExceeded(f"embedding {index} did not reach width 2^-{precision}")

    def house(self, x: FieldElement, precision: int = 64) -> Interval:
        x = self.check(x)
        if x.is_rational():
            return Interval(abs(x.coords[0]))
        mods = []
        for i in range(self.degree):
            box = self.embed(x, i, precision + 2)
            if box.im.is_point and box.im.lo == 0:
                mods.append(abs(box.re))
            else:
                mods.append(box.modulus(precision + 8))
        return reduce(lambda a, b: a.max(b), mods)

    def house_upper(self, x: FieldElement) -> Fraction:
        """Cheap rigorous upper bound of the house: sum |c_i| R^i."""
        x = self.check(x)
        if x.is_rational():
            return Fraction(abs(x.coords[0]))
        key = ("rmax",)
        rmax = self._cache.get(key)
        if rmax is None:
            rmax = max(disc.modulus(64).hi for disc in self.roots)
            rmax = _round_up_grid(rmax, 64)
            self._cache[key] = rmax
        acc = Fraction(0)
        p = Fraction(1)
        for c in x.coords:
            acc += abs(c) * p
            p *= rmax
        return acc

    def to_dict(self) -> dict:
        return {
            "minpoly": list(self.minpoly.coefficients),
            "minpoly_text": self.minpoly.to_text(),
            "degree": self.degree,
            "classification": self.classification.to_dict(),
        }


def _round_up_grid(v: Fraction, bits: int) -> Fraction:
    den = 1 << bits
    return Fraction(-((-v.numerator * den) // v.denominator), den)


def _horner_box(coords, z: ComplexBox, prec: int) -> ComplexBox:
    acc = ComplexBox.point(0)
    for c in reversed(coords):
        acc = (acc * z + c).round_out(prec)
    return acc


def _align(reference, found):
    """Reorder refined discs so index i refines reference disc i."""
    out = []
    for ref in reference:
        hit = None
        for disc in found:
            dre, dim = disc.re - ref.re, disc.im - ref.im
            if dre * dre + dim * dim <= ref.radius * ref.radius:
                hit = disc
                break
        if hit is None:
            raise RefinementBudgetExceeded("refined root discs do not match the originals")
        out.append(hit)
    return tuple(out)


def _bareiss_det(m: list) -> int:
    n = len(m)
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _irreducibility_screen(poly: MonicIntPolynomial, assume_irreducible: bool) -> None:
    c0 = poly.coefficients[0]
    if c0 == 0:
        raise ReducibleRejected(f"{poly} is divisible by x")
    if poly.degree == 1:
        return
    # rational root test: monic, so rational roots are integer divisors of c0
    for cand in sympy.divisors(abs(c0)):
        for r in (cand, -cand):
            if poly(r) == 0:
                raise ReducibleRejected(f"{poly} has the rational root {r}")
    if poly.degree > 4 and assume_irreducible:
        return
    _, factors = sympy.factor_list(sympy.Poly(list(reversed(poly.coefficients)), _X))
    if len(factors) != 1 or factors[0][1] != 1:
        shown = " * ".join(f"({f.as_expr()})^{k}" for f, k in factors)
        raise ReducibleRejected(f"{poly} factors as {shown}")


def build_field(minpoly, precision: int = DEFAULT_PRECISION, *, assume_irreducible: bool = False,
                max_doublings: int = DEFAULT_DOUBLINGS) -> AlgebraicField:
    """Build Q(q) for the real root q > 1 of ``minpoly`` with certified root discs.

    Irreducibility is checked exactly (rational roots, then sympy factoring).
    For degree above 4 the factoring step may be skipped with
    ``assume_irreducible=True``; the rational-root test always runs.
    """
    poly = parse_polynomial(minpoly)
    if precision < 16:
        raise InvalidInput("precision must be at least 16 bits")
    if poly.degree == 1:
        t = -poly.coefficients[0]
        if t <= 1:
            raise NoRealRootAboveOne(f"{poly} has root {t}, which is not > 1")
        disc = RootDisc(Fraction(t), Fraction(0), Fraction(0))
        return AlgebraicField(poly, (disc,), 0, BaseClassification(PISOT, None), precision, max_doublings)
    _irreducibility_screen(poly, assume_irreducible)

    bits = precision
    last = None
    for _ in range(max_doublings + 1):
        discs = isolate_roots(poly, bits)
        if discs is not None:
            last = (discs, bits)
            principal = _principal(poly, discs)
            if principal == -1:
                raise NoRealRootAboveOne(f"{poly} has no real root greater than 1")
            if principal is not None:
                cls = _classify_discs(poly, discs, principal)
                if cls.kind != UNDECIDED:
                    return AlgebraicField(poly, discs, principal, cls, bits, max_doublings)
        bits *= 2
    if last is None:
        raise RefinementBudgetExceeded(f"could not isolate the roots of {poly}")
    discs, bits = last
    principal = _principal(poly, discs)
    if principal is None or principal == -1:
        raise NoRealRootAboveOne(f"could not certify a real root > 1 for {poly}")
    return AlgebraicField(poly, discs, principal, BaseClassification(UNDECIDED, None), bits, max_doublings)


def _principal(poly: MonicIntPolynomial, discs):
    """Index of the largest real root > 1; -1 if certainly none; None if unclear."""
    best = None
    for i, disc in enumerate(discs):
        if not disc.is_real:
            continue
        lo, hi = disc.re - disc.radius, disc.re + disc.radius
        if lo > 1:
            if best is None or disc.re > discs[best].re:
                best = i
        elif hi >= 1 and not (hi == 1 or poly(1) == 0):
            return None
    return -1 if best is None else best


def classify_base(field: AlgebraicField) -> BaseClassification:
    return field.classification


_OPS = {"add": "add", "sub": "sub", "mul": "mul"}


def element_arith(field: AlgebraicField, op: str, x, y) -> FieldElement:
    if op not in _OPS:
        raise InvalidInput(f"unknown operation {op!r}; expected add, sub or mul")
    x, y = field.check(x), field.check(y)
    return getattr(field, _OPS[op])(x, y)


def house(field: AlgebraicField, x, precision: int = 64) -> Interval:
    return field.house(field.check(x), precision)


def field_norm(field: AlgebraicField, x) -> int:
    return field.norm(field.check(x))


def embed(field: AlgebraicField, x, conjugate_index: int, precision: int = 64) -> ComplexBox:
    return field.embed(field.check(x), conjugate_index, precision)
