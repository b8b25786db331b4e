"""Binary digit counts, floor logarithms and the Carlitz weight.

Everything here is exact integer arithmetic. ``n = 0`` is rejected by every
function because all the sums built on top of them start at ``n >= 1``.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator


class Sign(str, enum.Enum):
    """Selects gamma (``PLUS``) or its alternating analog ln(4/pi) (``MINUS``)."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def unit(self) -> int:
        return 1 if self is Sign.PLUS else -1

    def power(self, e: int) -> int:
        """``(+1)**e`` or ``(-1)**e``."""
        if self is Sign.PLUS or e % 2 == 0:
            return 1
        return -1


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")


def _check_base(q: int) -> None:
    if q < 2:
        raise ValueError(f"base q must be >= 2, got {q}")


@dataclass(frozen=True)
class DigitCounts:
    n: int
    zeros: int
    ones: int

    def delta(self, sign: Sign) -> int:
        return self.ones + sign.unit * self.zeros


def count_binary_digits(n: int) -> DigitCounts:
    """Count the 0 and 1 bits of ``n`` written without leading zeros."""
    _check_n(n)
    ones = bin(n).count("1")
    return DigitCounts(n, n.bit_length() - ones, ones)


def delta(n: int, sign: Sign) -> int:
    """``N1(n) + N0(n)`` for ``Sign.PLUS``, ``N1(n) - N0(n)`` for ``Sign.MINUS``."""
    if n < 1:
        _check_n(n)
    if sign is Sign.PLUS:
        return n.bit_length()
    ones = bin(n).count("1")
    return 2 * ones - n.bit_length()


# Powers of each base seen so far; extended on demand.
_POWERS: dict[int, list[int]] = {}


def _powers_covering(n: int, q: int) -> list[int]:
    powers = _POWERS.get(q)
    if powers is None:
        powers = _POWERS[q] = [1]
    while powers[-1] <= n:
        powers.append(powers[-1] * q)
    return powers


def floor_log(n: int, q: int) -> int:
    """Return the unique ``L`` with ``q**L <= n < q**(L+1)``.

    Uses exact comparisons against a table of powers of ``q``; no floating
    point logarithm is involved, so powers of ``q`` land in the right bin.
    """
    if n < 1 or q < 2:
        _check_n(n)
        _check_base(q)
    if q == 2:
        return n.bit_length() - 1
    return bisect_right(_powers_covering(n, q), n) - 1


def epsilon(n: int, q: int) -> int:
    """Carlitz weight: ``q - 1`` when ``q`` divides ``n``, otherwise ``-1``."""
    if n < 1 or q < 2:
        _check_n(n)
        _check_base(q)
    return q - 1 if n % q == 0 else -1


SEQUENCE_KINDS = ("delta-plus", "delta-minus", "floor-log2", "vacca-numerators")


def sequence(kind: str, count: int) -> Iterator[int]:
    """Yield the first ``count`` values of an integer sequence indexed from n = 1.

    ``delta-minus`` is ``N1(n) - N0(n)``, the numerator sequence of the paired
    series for ln(4/pi). OEIS A037861 lists ``N0(n) - N1(n)``, so this is its
    negation. ``vacca-numerators`` is ``(-1)**n * floor(log2 n)``.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if kind not in SEQUENCE_KINDS:
        raise ValueError(f"unknown sequence kind {kind!r}")
    for n in range(1, count + 1):
        if kind == "delta-plus":
            yield delta(n, Sign.PLUS)
        elif kind == "delta-minus":
            yield delta(n, Sign.MINUS)
        elif kind == "floor-log2":
            yield floor_log(n, 2)
        else:
            yield (-1) ** n * floor_log(n, 2)
