"""Finite-range checks of every lemma, identity and bound behind the series.

Each ``check_*`` function returns a :class:`LemmaReport`; failures are
collected as witnesses (the offending inputs) rather than raised, and every
witness re-fails when the same check is run on it alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from .acceleration import (
    PPoly,
    averaged_identity_residual,
    build_p_poly,
    leading_coefficient_formula,
    p_poly_direct,
    shape_ratio,
    speedup_factor,
    two_m_minus_q_sum,
)
from .digits import Sign, delta, floor_log
from .numerics import Enclosure, a_term, rational_sum
from .series import Family, SeriesId, evaluate_at, partial_sum, rational_term, terms

log = logging.getLogger(__name__)

LEMMA_PRECISION = 96


@dataclass
class LemmaReport:
    suite: str
    cases_checked: int = 0
    max_residual: Fraction = Fraction(0)
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def record(self, ok: bool, witness, residual: Union[Fraction, int] = 0) -> None:
        self.cases_checked += 1
        residual = abs(Fraction(residual))
        if residual > self.max_residual:
            self.max_residual = residual
        if not ok:
            self.witnesses.append(witness)

    def fail(self, witness, residual: Union[Fraction, int] = 0) -> None:
        """Log a failing case whose count is added separately."""
        self.max_residual = max(self.max_residual, abs(Fraction(residual)))
        self.witnesses.append(witness)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.suite}: {self.cases_checked} cases, max residual {float(self.max_residual):.3e}"
        if self.witnesses:
            text += f", witnesses {self.witnesses[:5]}"
        return text


def _signs() -> tuple[Sign, Sign]:
    return (Sign.PLUS, Sign.MINUS)


# -- digit identities --------------------------------------------------------

def check_lemma2(n_max: int) -> LemmaReport:
    """``Delta(n // 2) + (+-1)**(n-1) == Delta(n)`` for ``2 <= n <= n_max``, both signs."""
    report = LemmaReport("lemma2")
    for sign in _signs():
        alt = sign.power(1)
        for n in range(2, n_max + 1):
            lhs = delta(n >> 1, sign) + (alt if n % 2 == 0 else 1)
            rhs = delta(n, sign)
            if lhs != rhs:
                report.fail((n, sign.value), lhs - rhs)
        report.cases_checked += max(n_max - 1, 0)
    return report


def check_vacca_numerators(n_max: int) -> LemmaReport:
    """``N1(n//2) + N0(n//2) == floor(log2 n)`` for ``2 <= n <= n_max``."""
    report = LemmaReport("vacca-numerators")
    for n in range(2, n_max + 1):
        lhs, rhs = delta(n >> 1, Sign.PLUS), floor_log(n, 2)
        if lhs != rhs:
            report.fail(n, lhs - rhs)
    report.cases_checked += max(n_max - 1, 0)
    return report


def check_floor_log_powers(l_max: int = 40, qs: Sequence[int] = range(2, 13)) -> LemmaReport:
    report = LemmaReport("floor-log")
    for q in qs:
        for L in range(1, l_max + 1):
            ok = floor_log(q ** L, q) == L and floor_log(q ** L - 1, q) == L - 1
            report.record(ok, (q, L))
    return report


# -- A_n recursion and bounds -----------------------------------------------------------------

def check_lemma1(n_max: int, precision_bits: int = LEMMA_PRECISION) -> LemmaReport:
    """Recursion ``A_n = 1/(2n(2n+1)) + A_2n + A_2n+1`` and ``0 < A_n < 1/n - 1/(n+1)``."""
    report = LemmaReport("lemma1")
    tol = Fraction(1, 2 ** (precision_bits - 4))
    for n in range(1, n_max + 1):
        an = a_term(n, precision_bits)
        rhs = (a_term(2 * n, precision_bits).value + a_term(2 * n + 1, precision_bits).value
               + Fraction(1, 2 * n * (2 * n + 1)))
        residual = an.value - rhs
        ok = residual.straddles_zero() and residual.width <= tol and an.within_bounds()
        report.record(ok, n, residual.width)
    return report


# -- dyadic block identity and the remainder bound -----------------------------------------

class Lemma3Tables:
    """Shared A_n enclosures and running sums for all ``k <= k_max``.

    For each ``k`` holds ``S`` (partial sum of the defining series through
    ``2**k - 1``), the exact paired sum ``D`` over ``n < 2**(k-1)`` (empty
    for ``k = 1``, where ``S_1 = A_1 = R_1``), and the remainder ``R`` over
    ``2**(k-1) <= n < 2**k``, for one sign.
    """

    def __init__(self, k_max: int, precision_bits: int = LEMMA_PRECISION):
        if not 1 <= k_max <= 24:
            raise ValueError("k must be between 1 and 24")
        self.k_max = k_max
        self.precision_bits = precision_bits
        self.a = [None] + [a_term(n, precision_bits).value for n in range(1, 2 ** k_max)]
        self._rows: dict[Sign, list] = {}

    def rows(self, sign: Sign) -> list[tuple[Enclosure, Fraction, Enclosure]]:
        if sign in self._rows:
            return self._rows[sign]
        bits = self.precision_bits
        paired = SeriesId(Family.PAIRED6, sign)
        s_lo = s_hi = Fraction(0)
        d = Fraction(0)
        rows = []
        for k in range(1, self.k_max + 1):
            first, last = 2 ** (k - 1), 2 ** k - 1
            r_lo = r_hi = Fraction(0)
            for n in range(first, last + 1):
                a = self.a[n]
                if sign.power(n - 1) == 1:
                    s_lo += a.lo
                    s_hi += a.hi
                else:
                    s_lo -= a.hi
                    s_hi -= a.lo
                weight = delta(n, sign)
                lo, hi = (a.lo, a.hi) if weight >= 0 else (a.hi, a.lo)
                r_lo += weight * lo
                r_hi += weight * hi
            # The paired sum stops one dyadic block short: n < 2**(k-1).
            if k > 1:
                d = rational_sum([d, *terms(paired, 2 ** (k - 2), first=2 ** (k - 2))])
            rows.append((Enclosure.around(s_lo, s_hi, bits), d, Enclosure.around(r_lo, r_hi, bits)))
        self._rows[sign] = rows
        return rows


def _lemma3_case(tables: Lemma3Tables, k: int, sign: Sign) -> tuple[bool, Fraction]:
    s, d, r = tables.rows(sign)[k - 1]
    residual = s - Enclosure.exact(d, tables.precision_bits) - r
    tol = Fraction(2 ** k, 2 ** (tables.precision_bits - 4))
    return residual.straddles_zero() and residual.width <= tol, residual.width


def check_lemma3(k: int, sign: Sign, precision_bits: int = LEMMA_PRECISION,
                 tables: Lemma3Tables | None = None) -> LemmaReport:
    """``S_{2^k-1} = sum_{n<2^(k-1)} Delta(n)/(2n(2n+1)) + R_k`` within ``2**(k+4-bits)``."""
    tables = tables or Lemma3Tables(k, precision_bits)
    report = LemmaReport("lemma3")
    ok, width = _lemma3_case(tables, k, Sign(sign))
    report.record(ok, (k, Sign(sign).value), width)
    return report


def remainder_magnitude(k: int, sign: Sign, precision_bits: int = LEMMA_PRECISION,
                        tables: Lemma3Tables | None = None) -> Fraction:
    tables = tables or Lemma3Tables(k, precision_bits)
    return tables.rows(Sign(sign))[k - 1][2].magnitude


def check_remainder_bound(k: int, sign: Sign, precision_bits: int = LEMMA_PRECISION,
                          tables: Lemma3Tables | None = None, max_escalations: int = 3) -> LemmaReport:
    """Strict ``|R_k|.hi < k / 2**k``; precision is doubled rather than the test relaxed."""
    if not 1 <= k <= 20:
        raise ValueError("k must be between 1 and 20")
    report = LemmaReport("remainder")
    bound = Fraction(k, 2 ** k)
    bits = precision_bits
    mag = remainder_magnitude(k, sign, bits, tables)
    for _ in range(max_escalations):
        if mag < bound:
            break
        bits *= 2
        mag = remainder_magnitude(k, sign, bits)
    report.record(mag < bound, (k, Sign(sign).value), mag)
    return report


# -- limits of the paired series --------------------------------------------------------

def check_theorem1_limits(sign: Sign, N: int, precision_bits: int = 64) -> LemmaReport:
    """The paired series and the defining series must give intersecting enclosures."""
    report = LemmaReport("theorem1-limits")
    paired = evaluate_at(SeriesId(Family.PAIRED6, sign), N, precision_bits)
    base = evaluate_at(SeriesId(Family.BASE4, sign), N, precision_bits)
    ok = paired.value.intersects(base.value)
    gap = Fraction(0) if ok else max(paired.value.lo - base.value.hi, base.value.lo - paired.value.hi)
    report.record(ok, (Sign(sign).value, N), gap)
    return report


# -- exact series identities ---------------------------------------------------

def check_pairing(n_max: int, sign: Sign, spot_checks: Sequence[int] = (1, 2, 10, 100)) -> LemmaReport:
    """Unpaired partial sums through ``n = 2N+1`` equal paired partial sums through ``N``.

    Tracks the exact difference of the two running partial sums, which stays
    small, then confirms a few cuts (always including ``n_max``) by summing
    both sides from scratch.
    """
    sign = Sign(sign)
    report = LemmaReport("pairing")
    five, six = SeriesId(Family.RATIONAL5, sign), SeriesId(Family.PAIRED6, sign)
    diff = Fraction(0)
    for N in range(1, n_max + 1):
        diff += rational_term(five, 2 * N) + rational_term(five, 2 * N + 1) - rational_term(six, N)
        report.record(diff == 0, (N, sign.value), diff)
    for N in sorted({*spot_checks, n_max}):
        if 1 <= N <= n_max:
            lhs, rhs = partial_sum(five, 2 * N), partial_sum(six, N)
            report.record(lhs == rhs, (N, sign.value), lhs - rhs)
    return report


def check_vacca_identity(n_max: int) -> LemmaReport:
    report = LemmaReport("vacca-identity")
    vacca, five = SeriesId(Family.VACCA3), SeriesId(Family.RATIONAL5)
    for n in range(2, n_max + 1):
        a, b = rational_term(vacca, n), rational_term(five, n)
        report.record(a == b, n, a - b)
    return report


def check_grouping(q: int, n_max: int, spot_checks: Sequence[int] = (1, 2, 10, 100)) -> LemmaReport:
    """Carlitz partial sums through ``n = qN+q-1`` equal first-member grouped sums through ``N``."""
    report = LemmaReport("grouping")
    carlitz, grouped = SeriesId(Family.CARLITZ10, q=q), SeriesId(Family.GROUPED_FIRST17, q=q)
    diff = sum(terms(carlitz, q - 1), Fraction(0))
    report.record(diff == 0, (q, 0), diff)
    for N in range(1, n_max + 1):
        diff += sum(terms(carlitz, q, first=q * N), Fraction(0)) - rational_term(grouped, N)
        report.record(diff == 0, (q, N), diff)
    for N in sorted({*spot_checks, n_max}):
        if 1 <= N <= n_max:
            lhs, rhs = partial_sum(carlitz, q * N + q - 1), partial_sum(grouped, N)
            report.record(lhs == rhs, (q, N), lhs - rhs)
    return report


def check_q2_addison(n_max: int) -> LemmaReport:
    report = LemmaReport("q2-addison")
    thm, addison = SeriesId(Family.THEOREM2_9, q=2), SeriesId(Family.ADDISON7)
    for n in range(1, n_max + 1):
        a, b = rational_term(thm, n), rational_term(addison, n)
        report.record(a == b, n, a - b)
    return report


def check_grouped_positivity(q: int, n_max: int) -> LemmaReport:
    report = LemmaReport("grouped-positivity")
    for n, t in enumerate(terms(SeriesId(Family.GROUPED_FIRST17, q=q), n_max), start=1):
        report.record(t >= 0, (q, n))
    return report


# -- accelerating polynomial -------------------------------------------------------

def check_averaged_identity(qs: Sequence[int], n_max: int,
                            fault: tuple[int, int, int] | None = None) -> LemmaReport:
    """Exact zero residual of the averaging step; ``fault`` = (q, coefficient, shift)."""
    report = LemmaReport("averaged-identity")
    for q in qs:
        poly: PPoly = build_p_poly(q)
        if fault is not None and fault[0] == q:
            poly = poly.perturbed(fault[1], fault[2])
        for n in range(1, n_max + 1):
            r = averaged_identity_residual(q, n, poly)
            report.record(r == 0, (q, n), r)
    return report


def check_two_m_minus_q(q_max: int = 200) -> LemmaReport:
    report = LemmaReport("two-m-minus-q")
    for q in range(2, q_max + 1):
        s = two_m_minus_q_sum(q)
        report.record(s == 0, q, s)
    return report


def check_p_poly(q_max: int = 12, points: int = 100) -> LemmaReport:
    """Expanded ``P_q`` against its unexpanded definition, plus shape invariants."""
    report = LemmaReport("p-poly-oracle")
    for q in range(2, q_max + 1):
        poly = build_p_poly(q)
        shape_ok = (poly.degree == q - 2 and all(c > 0 for c in poly.coefficients)
                    and poly.leading == leading_coefficient_formula(q))
        report.record(shape_ok, (q, "shape"))
        for x in range(1, points + 1):
            expanded, direct = poly(x), p_poly_direct(q, x)
            report.record(expanded == direct, (q, x), expanded - direct)
    return report


def check_shape_ratio(qs: Sequence[int], n: int = 1000, tol: Fraction = Fraction(1, 100),
                      decades: Sequence[int] = (10, 100, 1000, 10000)) -> LemmaReport:
    """``|shape_ratio - 1| <= tol`` at ``n`` and ``~C/n`` decay across decades.

    The decay is checked by requiring each tenfold increase of ``n`` to shrink
    the deviation by a factor between 8 and 12; the fitted ``C`` is the
    largest ``n * |ratio - 1|`` seen.
    """
    report = LemmaReport("shape-ratio")
    for q in qs:
        dev = abs(shape_ratio(q, n) - 1)
        report.record(dev <= tol, (q, n), dev)
        devs = [abs(shape_ratio(q, m) - 1) for m in decades]
        fitted = max(m * d for m, d in zip(decades, devs))
        log.debug("q=%d fitted C=%.4f", q, float(fitted))
        for (m1, d1), (m2, d2) in zip(zip(decades, devs), zip(decades[1:], devs[1:])):
            factor = d1 / d2 * Fraction(m1, m2) * 10 if d2 else Fraction(0)
            report.record(8 <= factor <= 12 and d2 <= fitted / m2, (q, m2), d2)
    return report


def check_speedup_order(q_max: int = 12, precision_bits: int = 64) -> LemmaReport:
    """Enclosures of ``(1 - q**-2)/ln q`` strictly decrease (are disjoint) in ``q``."""
    report = LemmaReport("speedup-order")
    prev = speedup_factor(2, precision_bits)
    for q in range(3, q_max + 1):
        cur = speedup_factor(q, precision_bits)
        report.record(cur.hi < prev.lo, q, prev.lo - cur.hi)
        prev = cur
    return report


# -- driver ----------------------------------------------------------------------

@dataclass
class VerifyConfig:
    lemma1_n_max: int = 1000
    lemma2_n_max: int = 2 ** 22
    floor_log_l_max: int = 40
    lemma3_k_max: int = 18
    remainder_k_max: int = 18
    precision_bits: int = LEMMA_PRECISION
    theorem1_terms: int = 10 ** 4
    pairing_n_max: int = 10 ** 4
    vacca_n_max: int = 10 ** 5
    grouping_qs: tuple[int, ...] = (2, 3, 5, 10)
    grouping_n_max: int = 10 ** 4
    q2_n_max: int = 10 ** 5
    averaged_qs: tuple[int, ...] = tuple(range(2, 13))
    averaged_n_max: int = 1000
    two_m_q_max: int = 200
    shape_qs: tuple[int, ...] = (2, 3, 10)
    p_poly_q_max: int = 12
    speedup_q_max: int = 12
    fault: tuple[int, int, int] | None = None

    @classmethod
    def quick(cls) -> "VerifyConfig":
        """Reduced ranges that finish in seconds."""
        return cls(lemma1_n_max=100, lemma2_n_max=2 ** 14, lemma3_k_max=10, remainder_k_max=10,
                   theorem1_terms=1000, pairing_n_max=500, vacca_n_max=5000, grouping_n_max=500,
                   q2_n_max=5000, averaged_n_max=100)

    @classmethod
    def empty(cls) -> "VerifyConfig":
        """Every range empty; each suite passes vacuously."""
        return cls(lemma1_n_max=0, lemma2_n_max=0, floor_log_l_max=0, lemma3_k_max=0,
                   remainder_k_max=0, theorem1_terms=0, pairing_n_max=0, vacca_n_max=0,
                   grouping_qs=(), grouping_n_max=0, q2_n_max=0, averaged_qs=(), averaged_n_max=0,
                   two_m_q_max=1, shape_qs=(), p_poly_q_max=1, speedup_q_max=2)


def _merge(name: str, reports: Sequence[LemmaReport]) -> LemmaReport:
    merged = LemmaReport(name)
    for r in reports:
        merged.cases_checked += r.cases_checked
        merged.max_residual = max(merged.max_residual, r.max_residual)
        merged.witnesses.extend(r.witnesses)
    return merged


def _lemma3_suite(cfg: VerifyConfig, tables: Lemma3Tables | None) -> LemmaReport:
    if cfg.lemma3_k_max < 1:
        return LemmaReport("lemma3")
    return _merge("lemma3", [check_lemma3(k, s, cfg.precision_bits, tables)
                             for s in _signs() for k in range(1, cfg.lemma3_k_max + 1)])


def _remainder_suite(cfg: VerifyConfig, tables: Lemma3Tables | None) -> LemmaReport:
    if cfg.remainder_k_max < 1:
        return LemmaReport("remainder")
    return _merge("remainder", [check_remainder_bound(k, s, cfg.precision_bits, tables)
                                for s in _signs() for k in range(1, cfg.remainder_k_max + 1)])


SUITES = (
    "lemma1", "lemma2", "vacca-numerators", "floor-log", "lemma3", "remainder", "theorem1-limits",
    "pairing", "vacca-identity", "grouping", "q2-addison", "grouped-positivity",
    "averaged-identity", "two-m-minus-q", "p-poly-oracle", "shape-ratio", "speedup-order",
)


def run_all(config: VerifyConfig | None = None,
            suites: Sequence[str] | None = None) -> list[LemmaReport]:
    """Run the selected suites (all by default) in a fixed order."""
    cfg = config or VerifyConfig()
    wanted = list(SUITES) if suites is None else list(suites)
    unknown = set(wanted) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")

    tables = None
    k_need = max(cfg.lemma3_k_max if "lemma3" in wanted else 0,
                 cfg.remainder_k_max if "remainder" in wanted else 0)
    if k_need >= 1:
        tables = Lemma3Tables(k_need, cfg.precision_bits)

    runners: dict[str, Callable[[], LemmaReport]] = {
        "lemma1": lambda: check_lemma1(cfg.lemma1_n_max, cfg.precision_bits),
        "lemma2": lambda: check_lemma2(cfg.lemma2_n_max),
        "vacca-numerators": lambda: check_vacca_numerators(cfg.lemma2_n_max),
        "floor-log": lambda: check_floor_log_powers(cfg.floor_log_l_max),
        "lemma3": lambda: _lemma3_suite(cfg, tables),
        "remainder": lambda: _remainder_suite(cfg, tables),
        "theorem1-limits": lambda: _merge("theorem1-limits", [
            check_theorem1_limits(s, cfg.theorem1_terms) for s in _signs()] if cfg.theorem1_terms else []),
        "pairing": lambda: _merge("pairing", [check_pairing(cfg.pairing_n_max, s) for s in _signs()]),
        "vacca-identity": lambda: check_vacca_identity(cfg.vacca_n_max),
        "grouping": lambda: _merge("grouping", [check_grouping(q, cfg.grouping_n_max)
                                                for q in cfg.grouping_qs]),
        "q2-addison": lambda: check_q2_addison(cfg.q2_n_max),
        "grouped-positivity": lambda: _merge("grouped-positivity", [
            check_grouped_positivity(q, min(cfg.grouping_n_max, 1000)) for q in cfg.grouping_qs]),
        "averaged-identity": lambda: check_averaged_identity(cfg.averaged_qs, cfg.averaged_n_max,
                                                             cfg.fault),
        "two-m-minus-q": lambda: check_two_m_minus_q(cfg.two_m_q_max),
        "p-poly-oracle": lambda: check_p_poly(cfg.p_poly_q_max),
        "shape-ratio": lambda: check_shape_ratio(cfg.shape_qs),
        "speedup-order": lambda: check_speedup_order(cfg.speedup_q_max),
    }
    reports = []
    for name in SUITES:
        if name in wanted:
            report = runners[name]()
            log.info(report.summary())
            reports.append(report)
    return reports
