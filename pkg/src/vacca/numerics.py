"""Exact rationals and certified interval enclosures.

Rationals are :class:`fractions.Fraction`. An :class:`Enclosure` is a pair of
dyadic endpoints carrying ``precision_bits`` significant bits each; every
operation rounds the lower endpoint down and the upper endpoint up, so the
exact result of the operation on any points of the inputs stays inside.

The only transcendental quantity needed anywhere is ``ln((n+1)/n)``, which
:func:`log_ratio` evaluates from

    ln((n+1)/n) = 2 * sum_{k>=0} 1 / ((2k+1) * (2n+1)**(2k+1))

with a geometric bound on the truncated tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import gmpy2

from .errors import PrecisionUnreachable

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_PRECISION = 64
MIN_PRECISION = 16


def _shift_for(num: int, den: int, bits: int) -> int:
    return bits - (num.bit_length() - den.bit_length())


def round_down(x: Number, bits: int) -> Fraction:
    """Largest dyadic with about ``bits`` significant bits that is ``<= x``."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    if num == 0 or (den & (den - 1) == 0 and num.bit_length() <= bits):
        return x
    shift = _shift_for(num, den, bits)
    if shift >= 0:
        return Fraction((num << shift) // den, 1 << shift)
    return Fraction((num // (den << -shift)) << -shift)


def round_up(x: Number, bits: int) -> Fraction:
    return -round_down(-Fraction(x), bits)


@dataclass(frozen=True)
class Enclosure:
    """Certified interval ``[lo, hi]``; ``hi - lo`` is the error bound."""

    lo: Fraction
    hi: Fraction
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def around(cls, lo: Number, hi: Number, precision_bits: int = DEFAULT_PRECISION) -> "Enclosure":
        """Enclose ``[lo, hi]`` after outward rounding to ``precision_bits``."""
        return cls(round_down(lo, precision_bits), round_up(hi, precision_bits), precision_bits)

    @classmethod
    def exact(cls, x: Number, precision_bits: int = DEFAULT_PRECISION) -> "Enclosure":
        return cls.around(x, x, precision_bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return self.width / 2

    @property
    def magnitude(self) -> Fraction:
        """Upper bound on ``|x|`` over the enclosure."""
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x: Union[Number, "Enclosure"]) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "Enclosure") -> "Enclosure":
        if not self.intersects(other):
            raise ValueError("enclosures are disjoint")
        return Enclosure(max(self.lo, other.lo), min(self.hi, other.hi),
                         max(self.precision_bits, other.precision_bits))

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def widen(self, r: Number) -> "Enclosure":
        """Grow by ``r`` on both sides."""
        return Enclosure.around(self.lo - r, self.hi + r, self.precision_bits)

    def _coerce(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        if isinstance(other, (int, Fraction)):
            return Enclosure(Fraction(other), Fraction(other), self.precision_bits)
        return NotImplemented

    def _bits(self, other: "Enclosure") -> int:
        return max(self.precision_bits, other.precision_bits)

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo, self.precision_bits)

    def __add__(self, other) -> "Enclosure":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Enclosure.around(self.lo + other.lo, self.hi + other.hi, self._bits(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Enclosure":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Enclosure.around(self.lo - other.hi, self.hi - other.lo, self._bits(other))

    def __rsub__(self, other) -> "Enclosure":
        return (-self) + other

    def __mul__(self, other) -> "Enclosure":
        if isinstance(other, int):
            # Scaling by an integer keeps dyadic endpoints exact up to rounding.
            lo, hi = (self.lo * other, self.hi * other) if other >= 0 else (self.hi * other, self.lo * other)
            return Enclosure.around(lo, hi, self.precision_bits)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Enclosure.around(min(products), max(products), self._bits(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.straddles_zero():
            raise ZeroDivisionError("divisor enclosure contains zero")
        quotients = (self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi)
        return Enclosure.around(min(quotients), max(quotients), self._bits(other))

    def __rtruediv__(self, other) -> "Enclosure":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __abs__(self) -> "Enclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), self.magnitude, self.precision_bits)

    def __repr__(self) -> str:
        return f"Enclosure([{float(self.lo)!r}, {float(self.hi)!r}], {self.precision_bits} bits)"


def enclosure_sum(items: Iterable[Enclosure], precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Sum enclosures with a single outward rounding at the end.

    Endpoints are dyadic, so the intermediate sums are exact.
    """
    lo = hi = Fraction(0)
    for e in items:
        lo += e.lo
        hi += e.hi
    return Enclosure.around(lo, hi, precision_bits)


def enclose_rational_sum(terms: Iterable[Fraction], count: int,
                         precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclose ``sum(terms)`` without forming the exact rational.

    Each term is floored and ceiled on a fixed grid fine enough that the
    ``count`` accumulated rounding steps stay far below ``2**-precision_bits``
    for sums of order one.
    """
    scale = precision_bits + max(count, 1).bit_length() + 8
    lo = hi = 0
    for t in terms:
        num, den = t.numerator, t.denominator
        lo += (num << scale) // den
        hi -= (-num << scale) // den
    denom = 1 << scale
    return Enclosure.around(Fraction(lo, denom), Fraction(hi, denom), precision_bits)


def _check_precision(precision_bits: int) -> None:
    if precision_bits < MIN_PRECISION:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION}, got {precision_bits}")


def _log_ratio_fixed(n: int, scale: int) -> tuple[int, int]:
    """Integers ``lo, hi`` with ``lo <= 2**scale * ln((n+1)/n) <= hi``."""
    x = 2 * n + 1
    x2 = x * x
    one = 1 << (scale + 1)  # carries the leading factor 2
    lo = 0
    k = 0
    power = x  # x**(2k+1)
    while True:
        lo += one // ((2 * k + 1) * power)
        k += 1
        power *= x2
        # Omitted tail <= first omitted term / (1 - x**-2).
        tail_den = (2 * k + 1) * power * (x2 - 1)
        tail = -(-one * x2 // tail_den)
        if tail <= 1:
            break
    # Each floored term lost less than one unit.
    return lo, lo + k + tail


def log_ratio(n: int, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Certified enclosure of ``ln((n+1)/n)`` of width at most ``2**(1-precision_bits)``."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    _check_precision(precision_bits)
    scale = precision_bits + n.bit_length() + 8
    lo, hi = _log_ratio_fixed(n, scale)
    return Enclosure.around(Fraction(lo, 1 << scale), Fraction(hi, 1 << scale), precision_bits)


@dataclass(frozen=True)
class ATerm:
    """Enclosure of ``A_n = 1/n - ln((n+1)/n)``."""

    n: int
    value: Enclosure

    def within_bounds(self) -> bool:
        """``0 < A_n < 1/n - 1/(n+1)`` as certified by the enclosure."""
        return self.value.lo > 0 and self.value.hi < Fraction(1, self.n * (self.n + 1))


def a_term(n: int, precision_bits: int = DEFAULT_PRECISION) -> ATerm:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    _check_precision(precision_bits)
    # A_n is about 1/(2 n^2): cancellation eats ~bitlen(n) bits beyond log_ratio's.
    scale = precision_bits + 2 * n.bit_length() + 8
    log_lo, log_hi = _log_ratio_fixed(n, scale)
    inv_lo = (1 << scale) // n
    inv_hi = -(-(1 << scale) // n)
    denom = 1 << scale
    value = Enclosure.around(Fraction(inv_lo - log_hi, denom), Fraction(inv_hi - log_lo, denom),
                             precision_bits)
    return ATerm(n, value)


def rational_sum(terms: Iterable[Number]) -> Fraction:
    """Exact sum, computed by pairwise (tree) reduction with GMP rationals."""
    layer = [gmpy2.mpq(t.numerator, t.denominator) if isinstance(t, Fraction) else gmpy2.mpq(t)
             for t in terms]
    if not layer:
        return Fraction(0)
    while len(layer) > 1:
        nxt = [layer[i] + layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    total = layer[0]
    return Fraction(int(total.numerator), int(total.denominator))


def _decimal_digits(x: Fraction, digits: int, up: bool = False) -> tuple[int, int]:
    """Sign and ``floor(|x| * 10**digits)`` (or ceiling when ``up``)."""
    scaled = abs(x) * 10 ** digits
    q = scaled.numerator // scaled.denominator
    if up and q * scaled.denominator != scaled.numerator:
        q += 1
    return (-1 if x < 0 else 1), q


def _format_fixed(sign: int, scaled: int, digits: int) -> str:
    text = str(scaled).rjust(digits + 1, "0")
    head, tail = text[:len(text) - digits], text[len(text) - digits:]
    body = f"{head}.{tail}" if digits else head
    return ("-" if sign < 0 and scaled else "") + body


def power_of_ten_above(x: Fraction) -> int:
    """Smallest ``k`` with ``10**k >= x`` for positive ``x``."""
    if x <= 0:
        raise ValueError("x must be positive")
    k = len(str(x.numerator)) - len(str(x.denominator))
    while Fraction(10) ** k < x:
        k += 1
    while Fraction(10) ** (k - 1) >= x:
        k -= 1
    return k


def radius_text(enc: Enclosure) -> str:
    if enc.radius == 0:
        return "0"
    return f"1e{power_of_ten_above(enc.radius)}"


def _agrees(enc: Enclosure, digits: int) -> bool:
    if enc.lo < 0 < enc.hi:
        return False
    s1, a = _decimal_digits(enc.lo, digits)
    s2, b = _decimal_digits(enc.hi, digits)
    return s1 == s2 and a == b


def decimal_render(value: Union[Fraction, int, Enclosure], digits: int) -> str:
    """Render a rational exactly rounded, or an enclosure's certified digits.

    For a rational the result is rounded half-to-even at ``digits`` places.
    For an enclosure only digits shared by both endpoints are printed, followed
    by `` (± 1eK)`` where ``10**K`` bounds the half-width. Raises
    :class:`PrecisionUnreachable` when fewer than ``digits`` places agree.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if isinstance(value, Enclosure):
        if not _agrees(value, digits):
            raise PrecisionUnreachable(
                f"enclosure of width {float(value.width):.3g} does not certify {digits} digits")
        sign, scaled = _decimal_digits(value.lo, digits)
        return f"{_format_fixed(sign, scaled, digits)} (± {radius_text(value)})"
    x = Fraction(value)
    scaled = abs(x) * 10 ** digits
    return _format_fixed(-1 if x < 0 else 1, round(scaled), digits)


def agreed_digits(enc: Enclosure, max_digits: int = 40) -> int:
    """Number of decimal places on which both endpoints agree (0 if none)."""
    best = 0
    for d in range(1, max_digits + 1):
        if not _agrees(enc, d):
            break
        best = d
    return best


def agreed_prefix(enc: Enclosure, max_digits: int = 40) -> str:
    """The shared decimal prefix of ``enc.lo`` and ``enc.hi``, without radius."""
    d = agreed_digits(enc, max_digits)
    if d == 0:
        if enc.lo < 0 < enc.hi:
            return ""
        s1, a = _decimal_digits(enc.lo, 0)
        s2, b = _decimal_digits(enc.hi, 0)
        return _format_fixed(s1, a, 0) if (s1, a) == (s2, b) else ""
    sign, scaled = _decimal_digits(enc.lo, d)
    return _format_fixed(sign, scaled, d)
