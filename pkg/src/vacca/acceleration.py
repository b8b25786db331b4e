"""The accelerating polynomial ``P_q`` and the averaging behind it.

``P_q(x) = (qx+1)(qx+2)...(qx+q-1) * sum_{m=1}^{q-1} m(q-m)/(qx+m)`` is an
integer polynomial of degree ``q - 2``. Averaging the two q-tuple groupings
of Carlitz's series gives, term by term,

    (q-1)/(qn) - sum_m 2/(qn+m) + (q-1)/(qn+q) = 2 P_q(n) / (qn (qn+1) ... (qn+q))

and the resulting terms decay like ``(1 - q**-2)/ln q * ln n / (6 n**3)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .digits import floor_log
from .numerics import DEFAULT_PRECISION, Enclosure, enclosure_sum, log_ratio


def _check_base(q: int) -> None:
    if q < 2:
        raise ValueError(f"base q must be >= 2, got {q}")


@dataclass(frozen=True)
class PPoly:
    """Integer coefficients of ``P_q`` in ascending degree."""

    q: int
    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    def __call__(self, x: Union[int, Fraction]):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def perturbed(self, index: int, amount: int = 1) -> "PPoly":
        """Copy with one coefficient shifted; used for fault injection."""
        coeffs = list(self.coefficients)
        coeffs[index] += amount
        return PPoly(self.q, tuple(coeffs))


def _poly_mul_linear(poly: list[int], a: int, b: int) -> list[int]:
    """Multiply an ascending coefficient list by ``a*x + b``."""
    out = [0] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i] += b * c
        out[i + 1] += a * c
    return out


def build_p_poly(q: int) -> PPoly:
    """Expand ``P_q`` by convolving the linear factors ``qx + j`` exactly."""
    _check_base(q)
    total = [0] * (q - 1)
    for m in range(1, q):
        prod = [1]
        for j in range(1, q):
            if j != m:
                prod = _poly_mul_linear(prod, q, j)
        weight = m * (q - m)
        for i, c in enumerate(prod):
            total[i] += weight * c
    return PPoly(q, tuple(total))


def p_poly_direct(q: int, x: Union[int, Fraction]) -> Fraction:
    """``P_q(x)`` straight from its product-times-sum definition (no expansion)."""
    _check_base(q)
    prod = Fraction(1)
    for j in range(1, q):
        prod *= q * x + j
    return prod * sum(Fraction(m * (q - m)) / (q * x + m) for m in range(1, q))


def _block_denominator(q: int, n: int) -> int:
    den = 1
    for j in range(q + 1):
        den *= q * n + j
    return den


def averaged_identity_residual(q: int, n: int, poly: PPoly | None = None) -> Fraction:
    """Averaged bracket minus ``2 P_q(n) / (qn ... (qn+q))``; zero when the identity holds."""
    _check_base(q)
    if n < 1:
        raise ValueError("n must be a positive integer")
    poly = build_p_poly(q) if poly is None else poly
    bracket = (Fraction(q - 1, q * n)
               - sum(Fraction(2, q * n + m) for m in range(1, q))
               + Fraction(q - 1, q * n + q))
    return bracket - Fraction(2 * poly(n), _block_denominator(q, n))


def two_m_minus_q_sum(q: int) -> int:
    _check_base(q)
    return sum(2 * m - q for m in range(1, q))


def log_of_int(q: int, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Certified ``ln q`` as the telescoping sum of ``ln((j+1)/j)``, j < q."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    # q - 1 accumulated roundings; two extra guard bits per doubling of q.
    bits = precision_bits + 2 * q.bit_length()
    total = enclosure_sum((log_ratio(j, bits) for j in range(1, q)), bits)
    return Enclosure.around(total.lo, total.hi, precision_bits)


def speedup_factor(q: int, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``(1 - q**-2) / ln q``, the q-dependent factor of the term asymptotics."""
    _check_base(q)
    return Enclosure.exact(1 - Fraction(1, q * q), precision_bits) / log_of_int(q, precision_bits)


def shape_ratio(q: int, n: int) -> Fraction:
    """``[P_q(n) / (qn ... (qn+q))] / [(1 - q**-2) / (6 n**3)]``, tending to 1."""
    _check_base(q)
    if n < 1:
        raise ValueError("n must be a positive integer")
    term = Fraction(build_p_poly(q)(n), _block_denominator(q, n))
    return term / (Fraction(q * q - 1, q * q) / (6 * n ** 3))


def staircase_gap_holds(q: int, n: int) -> bool:
    """``0 < floor(log_q(qn)) * ln q - ln n <= ln q``, checked as ``q**(L-1) <= n < q**L``."""
    L = floor_log(q * n, q)
    return q ** (L - 1) <= n < q ** L


def leading_coefficient_formula(q: int) -> Fraction:
    """Predicted leading coefficient ``q**(q-2) * q (q^2 - 1) / 6``."""
    _check_base(q)
    return Fraction(q ** (q - 2) * q * (q * q - 1), 6)


def max_deviation(values: Sequence[Fraction]) -> Fraction:
    return max((abs(v - 1) for v in values), default=Fraction(0))
