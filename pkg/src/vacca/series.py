"""Catalog of the Vacca-type series for gamma and ln(4/pi).

Every family exposes exact rational terms (except ``BASE4``, whose terms
involve logarithms), exact or enclosed partial sums, and a certified bound on
the omitted tail. Partial sums always count terms from the family's first
index: ``partial_sum(s, N)`` adds the first ``N`` terms plus the family's
leading constant (1/2 for Addison's and the base-q accelerated series, 1
for the last-member grouping).

Tail bounds
-----------
Writing ``L(n)`` for the relevant floor logarithm, every rational family's
terms are dominated by ``c * L(n) * w(n)`` with ``w`` telescoping. Over a
block of indices where ``L`` is constant the sum of ``w`` collapses, and
summation by parts over blocks leaves ``(J+1) * w_first + sum of later
block heads``, the latter bounded by a geometric series:

* paired series: ``|Delta(n)| <= floor(log2 n) + 1`` and
  ``1/(2n(2n+1)) <= 1/(4n^2 - 1)``.
* accelerated base-q series (Addison's at q = 2): the term is below
  ``(q^2-1)/(6 q^2) * L(n) / (n^2 (n+1))`` and
  ``1/(n^2(n+1)) <= 1/((n-1) n (n+1))``.
* first- and last-member groupings: each group is at most ``(q-1)/(2q) * L(n) / n^2``.
* Vacca's series and the unpaired series are only cut after complete sign pairs,
  where their tail is the paired tail; Carlitz's series only after complete
  residue blocks, where its tail is the first-member grouping's tail.

When every term of a family has the same sign the limit lies on one side of
the partial sum, and :func:`evaluate_at` widens the enclosure on that side only.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from .acceleration import build_p_poly
from .digits import Sign, delta, epsilon, floor_log
from .errors import BudgetExhausted, PrecisionUnreachable, UnalignedCut
from .numerics import (
    DEFAULT_PRECISION,
    Enclosure,
    a_term,
    enclose_rational_sum,
    enclosure_sum,
    rational_sum,
)

DEFAULT_BUDGET = 10 ** 7


class Family(str, enum.Enum):
    BASE4 = "base4"
    VACCA3 = "vacca"
    RATIONAL5 = "rational5"
    PAIRED6 = "paired6"
    ADDISON7 = "addison"
    THEOREM2_9 = "theorem2"
    CARLITZ10 = "carlitz"
    GROUPED_FIRST17 = "grouped17"
    GROUPED_LAST18 = "grouped18"

    @property
    def has_minus(self) -> bool:
        return self in (Family.BASE4, Family.RATIONAL5, Family.PAIRED6)

    @property
    def has_q(self) -> bool:
        return self in (Family.THEOREM2_9, Family.CARLITZ10, Family.GROUPED_FIRST17,
                        Family.GROUPED_LAST18)

    @property
    def start(self) -> int:
        return 2 if self in (Family.VACCA3, Family.RATIONAL5) else 1

    @property
    def is_rational(self) -> bool:
        return self is not Family.BASE4


@dataclass(frozen=True)
class SeriesId:
    family: Family
    sign: Sign = Sign.PLUS
    q: int = 2

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "sign", Sign(self.sign))
        if self.sign is Sign.MINUS and not self.family.has_minus:
            raise ValueError(f"{self.family.value} has no ln(4/pi) analog")
        if self.q < 2:
            raise ValueError(f"base q must be >= 2, got {self.q}")
        if self.q != 2 and not self.family.has_q:
            raise ValueError(f"{self.family.value} takes no base parameter")

    @property
    def constant(self) -> str:
        return "gamma" if self.sign is Sign.PLUS else "ln4pi"

    @property
    def offset(self) -> Fraction:
        """Leading constant added by :func:`partial_sum`, not part of any term."""
        if self.family in (Family.ADDISON7, Family.THEOREM2_9):
            return Fraction(1, 2)
        if self.family is Family.GROUPED_LAST18:
            return Fraction(1)
        return Fraction(0)

    def __str__(self) -> str:
        text = self.family.value
        if self.family.has_minus:
            text += "+" if self.sign is Sign.PLUS else "-"
        if self.family.has_q:
            text += f"[q={self.q}]"
        return text


def _grouped_sum(q: int, n: int) -> tuple[Fraction, Fraction]:
    """``(q-1)/(qn) - sum_m 1/(qn+m)`` and ``-sum_m 1/(qn+m) + (q-1)/(qn+q)``."""
    inner = sum(Fraction(1, q * n + m) for m in range(1, q))
    return Fraction(q - 1, q * n) - inner, Fraction(q - 1, q * n + q) - inner


@lru_cache(maxsize=64)
def _theorem2_poly(q: int):
    return build_p_poly(q)


def rational_term(series: SeriesId, n: int) -> Fraction:
    """Exact ``n``-th term of a rational family (leading constants excluded)."""
    fam = series.family
    if not fam.is_rational:
        raise ValueError("base4 terms are not rational; use base_term")
    if n < fam.start:
        raise ValueError(f"{fam.value} starts at n = {fam.start}, got {n}")
    q = series.q
    if fam is Family.VACCA3:
        return Fraction((-1) ** n * floor_log(n, 2), n)
    if fam is Family.RATIONAL5:
        return Fraction((-1) ** n * delta(n // 2, series.sign), n)
    if fam is Family.PAIRED6:
        return Fraction(delta(n, series.sign), 2 * n * (2 * n + 1))
    if fam is Family.ADDISON7:
        return Fraction(floor_log(2 * n, 2), 2 * n * (2 * n + 1) * (2 * n + 2))
    if fam is Family.THEOREM2_9:
        den = 1
        for j in range(q + 1):
            den *= q * n + j
        return Fraction(floor_log(q * n, q) * _theorem2_poly(q)(n), den)
    if fam is Family.CARLITZ10:
        return Fraction(epsilon(n, q) * floor_log(n, q), n)
    first, last = _grouped_sum(q, n)
    group = first if fam is Family.GROUPED_FIRST17 else last
    return floor_log(q * n, q) * group


def terms(series: SeriesId, count: int, first: int | None = None) -> Iterator[Fraction]:
    """The first ``count`` rational terms, or ``count`` terms from index ``first``."""
    n = series.family.start if first is None else first
    for k in range(n, n + count):
        yield rational_term(series, k)


def base_term(sign: Sign, n: int, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``(+-1)**(n-1) * A_n``, the n-th term of the defining series."""
    value = a_term(n, precision_bits).value
    return value if Sign(sign).power(n - 1) == 1 else -value


def partial_sum(series: SeriesId, N: int,
                precision_bits: int = DEFAULT_PRECISION) -> Union[Fraction, Enclosure]:
    """Leading constant plus the first ``N`` terms; exact for rational families."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if series.family is Family.BASE4:
        start = series.family.start
        return enclosure_sum((base_term(series.sign, n, precision_bits)
                              for n in range(start, start + N)), precision_bits)
    return series.offset + rational_sum(terms(series, N))


def is_valid_cut(series: SeriesId, N: int) -> bool:
    fam = series.family
    if fam in (Family.VACCA3, Family.RATIONAL5):
        return N % 2 == 0
    if fam is Family.CARLITZ10:
        return (N + 1) % series.q == 0
    return True


def cut_at(series: SeriesId, m: int) -> int:
    """Term count of the ``m``-th valid cut (pairs, residue blocks, or terms)."""
    fam = series.family
    if fam in (Family.VACCA3, Family.RATIONAL5):
        return 2 * m
    if fam is Family.CARLITZ10:
        return series.q * m + series.q - 1
    return m


def align_cut(series: SeriesId, N: int) -> int:
    """Smallest valid cut at or above ``N`` (and at least 1)."""
    N = max(N, 1)
    while not is_valid_cut(series, N):
        N += 1
    return N


def _paired_tail(m: int) -> Fraction:
    J = floor_log(m + 1, 2)
    M = 1 << (J + 2)
    return Fraction(J + 1, 2 * (2 * m + 1)) + Fraction(1, 2 * (M - 1)) + Fraction(1, 2 * M - 1)


def _theorem2_tail(q: int, N: int) -> Fraction:
    J = floor_log(N + 1, q)
    Q = q ** (J + 1)
    return (Fraction(q * q - 1, 12 * q * q) * Fraction(J + 1, N * (N + 1))
            + Fraction(1, 12 * Q * (Q - 1)))


def _grouped_tail(q: int, N: int) -> Fraction:
    J = floor_log(N + 1, q)
    Q = q ** (J + 1)
    return Fraction(q - 1, 2 * q) * (Fraction(J + 1, N) + Fraction(q, (Q - 1) * (q - 1)))


def tail_bound(series: SeriesId, N: int) -> Fraction:
    """Certified bound on ``|limit - partial_sum(series, N)|``.

    Raises :class:`UnalignedCut` for alternating families cut inside a sign
    pair and for Carlitz's series cut inside a residue block.
    """
    if N < 1:
        raise ValueError("tail bounds need N >= 1")
    if not is_valid_cut(series, N):
        raise UnalignedCut(f"{series} cannot be certified after {N} terms")
    fam, q = series.family, series.q
    if fam is Family.BASE4:
        if series.sign is Sign.PLUS:
            return Fraction(1, N + 1)
        # Alternating with decreasing |A_n|: tail <= A_{N+1} < 1/((N+1)(N+2)).
        return Fraction(1, (N + 1) * (N + 2))
    if fam in (Family.VACCA3, Family.RATIONAL5):
        return _paired_tail(N // 2)
    if fam is Family.PAIRED6:
        return _paired_tail(N)
    if fam is Family.ADDISON7:
        return _theorem2_tail(2, N)
    if fam is Family.THEOREM2_9:
        return _theorem2_tail(q, N)
    if fam is Family.CARLITZ10:
        groups = (N + 1) // q - 1
        if groups == 0:
            first = rational_term(SeriesId(Family.GROUPED_FIRST17, q=q), 1)
            return first + _grouped_tail(q, 1)
        return _grouped_tail(q, groups)
    return _grouped_tail(q, N)


@dataclass(frozen=True)
class EvalReport:
    series: SeriesId
    terms_used: int
    partial: Union[Fraction, Enclosure]
    tail: Fraction
    value: Enclosure
    elapsed: float = field(default=0.0, compare=False)

    @property
    def certified_error(self) -> Fraction:
        """Tail bound plus the rounding width of the partial sum."""
        width = self.partial.width if isinstance(self.partial, Enclosure) else Fraction(0)
        return self.tail + width


def tail_sign(series: SeriesId, N: int | None = None) -> int:
    """Sign of ``limit - partial_sum(series, N)`` when it is known, else 0.

    Families whose terms share one sign give that sign for every ``N``. The
    alternating defining series for ln(4/pi) has decreasing ``|A_n|``, so its
    remainder after ``N`` terms has the sign ``(-1)**N`` of the first omitted term.
    """
    fam = series.family
    if fam is Family.BASE4 and series.sign is Sign.MINUS:
        return 0 if N is None else (1 if N % 2 == 0 else -1)
    if fam is Family.GROUPED_LAST18:
        return -1
    if series.sign is Sign.MINUS or fam in (Family.VACCA3, Family.RATIONAL5, Family.CARLITZ10):
        return 0
    return 1


def _widen_by_tail(series: SeriesId, N: int, partial: Enclosure, tail: Fraction,
                   bits: int) -> Enclosure:
    side = tail_sign(series, N)
    lo = partial.lo - (tail if side <= 0 else 0)
    hi = partial.hi + (tail if side >= 0 else 0)
    return Enclosure.around(lo, hi, bits)


def evaluate_at(series: SeriesId, N: int, precision_bits: int = DEFAULT_PRECISION,
                exact: bool = False) -> EvalReport:
    """Certified value of the series from its first ``N`` terms.

    With ``exact`` the partial sum of a rational family is formed as an exact
    fraction; otherwise each term is enclosed on a fine fixed-point grid,
    which is much cheaper for large ``N``.
    """
    tail = tail_bound(series, N)
    started = time.perf_counter()
    if series.family is Family.BASE4:
        partial: Union[Fraction, Enclosure] = partial_sum(series, N, precision_bits)
        value = _widen_by_tail(series, N, partial, tail, precision_bits)
    elif exact:
        partial = partial_sum(series, N)
        value = _widen_by_tail(series, N, Enclosure(partial, partial, precision_bits), tail, precision_bits)
    else:
        partial = enclose_rational_sum(terms(series, N), N, precision_bits) + series.offset
        value = _widen_by_tail(series, N, partial, tail, precision_bits)
    return EvalReport(series, N, partial, tail, value, time.perf_counter() - started)


def _smallest_cut(series: SeriesId, allowance: Fraction, budget: int) -> int:
    m_hi = 1
    while cut_at(series, m_hi) <= budget and tail_bound(series, cut_at(series, m_hi)) > allowance:
        m_hi *= 2
    if cut_at(series, m_hi) > budget:
        m_cap = m_hi
        while cut_at(series, m_cap) > budget:
            m_cap -= 1
        if m_cap < 1:
            raise BudgetExhausted(f"{series}: budget below one certified cut", Fraction(1), 0)
        best = tail_bound(series, cut_at(series, m_cap))
        if best > allowance:
            raise BudgetExhausted(
                f"{series}: error {float(best):.3g} at the {budget}-term cap exceeds target",
                best, cut_at(series, m_cap))
        m_hi = m_cap
    m_lo = m_hi // 2  # tail(m_lo) > allowance, or m_lo == 0
    while m_hi - m_lo > 1:
        mid = (m_lo + m_hi) // 2
        if tail_bound(series, cut_at(series, mid)) <= allowance:
            m_hi = mid
        else:
            m_lo = mid
    return cut_at(series, m_hi)


def evaluate(series: SeriesId, target_error, precision_bits: int = DEFAULT_PRECISION,
             budget: int = DEFAULT_BUDGET) -> EvalReport:
    """Evaluate to a certified error (tail plus rounding width) of at most ``target_error``."""
    target = Fraction(target_error)
    if target <= 0:
        raise ValueError("target_error must be positive")
    started = time.perf_counter()
    report = evaluate_at(series, _smallest_cut(series, target, budget), precision_bits)
    if report.certified_error > target:
        slack = target - (report.certified_error - report.tail)
        if slack <= 0:
            raise PrecisionUnreachable(
                f"{precision_bits}-bit rounding alone exceeds target {float(target):.3g}")
        report = evaluate_at(series, _smallest_cut(series, slack, budget), precision_bits)
        if report.certified_error > target:
            raise PrecisionUnreachable(f"could not reach {float(target):.3g} at {precision_bits} bits")
    return EvalReport(report.series, report.terms_used, report.partial, report.tail, report.value,
                      time.perf_counter() - started)


__all__ = [
    "DEFAULT_BUDGET", "EvalReport", "Family", "SeriesId", "align_cut", "base_term", "cut_at",
    "evaluate", "evaluate_at", "is_valid_cut", "partial_sum", "rational_term",
    "tail_bound", "tail_sign", "terms",
]
