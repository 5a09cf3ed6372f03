"""Exact scalars: rationals and Gaussian rationals a + b*i with a, b in Q.

Rationals are :class:`fractions.Fraction`, which already keeps the canonical
form we need (positive denominator, coprime parts, zero as 0/1).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import ParseError, ScalarError

Rational = Fraction

__all__ = [
    "ONE",
    "ZERO",
    "GaussianRational",
    "I",
    "Rational",
    "decode_gq",
    "decode_rational",
    "encode_gq",
    "encode_rational",
    "gq",
    "gq_arith",
    "gq_canonicalize",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarError(f"not a rational: {x!r}") from exc
    raise ScalarError(f"cannot interpret {x!r} as an exact rational")


class GaussianRational:
    """An element re + im*i of Q(i), always stored in canonical form."""

    __slots__ = ("im", "re")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> GaussianRational:
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise ScalarError("floating complex values are not exact; pass a GaussianRational")
        return cls(x)

    # -- predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except ScalarError:
                return NotImplemented
        return GaussianRational._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except ScalarError:
                return NotImplemented
        return GaussianRational._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except ScalarError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._make(a * c, b)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> GaussianRational:
        return GaussianRational._make(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|^2, a nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> GaussianRational:
        if self.is_zero():
            raise ScalarError("invalid scalar inverse: division by zero")
        if not self.im:
            return GaussianRational._make(1 / self.re, self.im)
        nrm = self.norm()
        return GaussianRational._make(self.re / nrm, -self.im / nrm)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except ScalarError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def sort_key(self):
        """Canonical total order: lexicographic on (re, im)."""
        return (self.re, self.im)

    def __lt__(self, other):
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussianRational._make(Fraction(0), Fraction(0))
ONE = GaussianRational._make(Fraction(1), Fraction(0))
I = GaussianRational._make(Fraction(0), Fraction(1))


def gq(re=0, im=0) -> GaussianRational:
    """Shorthand constructor; ``gq("1/2", -3)`` is 1/2 - 3i."""
    return GaussianRational(re, im)


def gq_arith(a: GaussianRational, b: GaussianRational, op: str) -> GaussianRational:
    """Exact field arithmetic; ``op`` is one of add, sub, mul, div."""
    a = GaussianRational.coerce(a)
    b = GaussianRational.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ScalarError(f"unknown scalar operation {op!r}")


def gq_canonicalize(quad) -> GaussianRational:
    """Build a canonical scalar from (re_num, re_den, im_num, im_den).

    Entries may be ints or decimal strings and need not be reduced.
    """
    if len(quad) != 4:
        raise ScalarError(f"expected 4 components, got {len(quad)}")
    try:
        rn, rd, im_n, im_d = (int(x) for x in quad)
    except (TypeError, ValueError) as exc:
        raise ScalarError(f"non-integer component in {quad!r}") from exc
    if rd == 0 or im_d == 0:
        raise ScalarError(f"zero denominator in {quad!r}")
    return GaussianRational._make(Fraction(rn, rd), Fraction(im_n, im_d))


def encode_gq(z: GaussianRational) -> list[str]:
    return [str(z.re.numerator), str(z.re.denominator), str(z.im.numerator), str(z.im.denominator)]


def decode_gq(obj) -> GaussianRational:
    if not isinstance(obj, (list, tuple)):
        raise ParseError(f"scalar must be a 4-element list, got {obj!r}")
    try:
        return gq_canonicalize(obj)
    except ScalarError as exc:
        raise ParseError(str(exc)) from exc


def encode_rational(q) -> dict:
    q = Fraction(q)
    return {"numerator": str(q.numerator), "denominator": str(q.denominator)}


def decode_rational(obj) -> Fraction:
    try:
        den = int(obj["denominator"])
        if den == 0:
            raise ParseError("zero denominator")
        return Fraction(int(obj["numerator"]), den)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad rational {obj!r}") from exc
