from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from vacca.digits import Sign
from vacca.errors import BudgetExhausted, PrecisionUnreachable, UnalignedCut
from vacca.numerics import Enclosure, a_term
from vacca.series import (
    EvalReport,
    Family,
    SeriesId,
    align_cut,
    base_term,
    cut_at,
    evaluate,
    evaluate_at,
    is_valid_cut,
    partial_sum,
    rational_term,
    tail_bound,
    tail_sign,
    terms,
)

with mpmath.workdps(60):
    GAMMA = Fraction(mpmath.nstr(mpmath.euler, 55, strip_zeros=False))
    LN4PI = Fraction(mpmath.nstr(mpmath.log(4 / mpmath.pi), 55, strip_zeros=False))
ORACLE_SLACK = Fraction(1, 10 ** 50)

PLUS, MINUS = Sign.PLUS, Sign.MINUS
RATIONAL_SERIES = [
    SeriesId(Family.VACCA3),
    SeriesId(Family.RATIONAL5, PLUS), SeriesId(Family.RATIONAL5, MINUS),
    SeriesId(Family.PAIRED6, PLUS), SeriesId(Family.PAIRED6, MINUS),
    SeriesId(Family.ADDISON7),
    *[SeriesId(Family.THEOREM2_9, q=q) for q in (2, 3, 5, 10)],
    *[SeriesId(Family.CARLITZ10, q=q) for q in (2, 3, 5)],
    *[SeriesId(Family.GROUPED_FIRST17, q=q) for q in (2, 3, 7)],
    *[SeriesId(Family.GROUPED_LAST18, q=q) for q in (2, 3, 7)],
]


def target(series: SeriesId) -> Fraction:
    return GAMMA if series.sign is PLUS else LN4PI


def ident(s):
    return str(s)


@pytest.mark.parametrize("series, n, expected", [
    (SeriesId(Family.RATIONAL5, MINUS), 8, Fraction(-1, 8)),
    (SeriesId(Family.RATIONAL5, PLUS), 16, Fraction(4, 16)),
    (SeriesId(Family.PAIRED6, PLUS), 3, Fraction(1, 21)),
    (SeriesId(Family.THEOREM2_9, q=3), 1, Fraction(1, 20)),
    (SeriesId(Family.CARLITZ10, q=3), 4, Fraction(-1, 4)),
    (SeriesId(Family.VACCA3), 5, Fraction(-2, 5)),
], ids=ident)
def test_rational_term_examples(series, n, expected):
    assert rational_term(series, n) == expected


def test_rational5_matches_printed_expansion():
    # gamma^- = 1/2 - 1/3 + ... written out from n = 2 with numerators Delta^-(n//2)
    s = SeriesId(Family.RATIONAL5, MINUS)
    nums = [rational_term(s, n) * n for n in range(2, 18)]
    assert nums == [1, -1, 0, 0, 2, -2, -1, 1, 1, -1, 1, -1, 3, -3, -2, 2]


@pytest.mark.parametrize("series, N, expected", [
    (SeriesId(Family.ADDISON7), 1, Fraction(13, 24)),
    (SeriesId(Family.PAIRED6, PLUS), 3, Fraction(11, 35)),
    (SeriesId(Family.GROUPED_LAST18, q=3), 0, Fraction(1)),
    (SeriesId(Family.GROUPED_LAST18, q=2), 0, Fraction(1)),
    (SeriesId(Family.RATIONAL5, PLUS), 2, Fraction(1, 6)),
    (SeriesId(Family.THEOREM2_9, q=5), 0, Fraction(1, 2)),
], ids=ident)
def test_partial_sum_examples(series, N, expected):
    assert partial_sum(series, N) == expected


def test_rejects_bad_ids_and_indices():
    with pytest.raises(ValueError):
        SeriesId(Family.ADDISON7, MINUS)
    with pytest.raises(ValueError):
        SeriesId(Family.THEOREM2_9, q=1)
    with pytest.raises(ValueError):
        SeriesId(Family.PAIRED6, q=3)
    with pytest.raises(ValueError):
        rational_term(SeriesId(Family.VACCA3), 1)
    with pytest.raises(ValueError):
        rational_term(SeriesId(Family.BASE4), 1)
    with pytest.raises(ValueError):
        partial_sum(SeriesId(Family.PAIRED6), -1)


def test_series_names():
    assert str(SeriesId(Family.PAIRED6, MINUS)) == "paired6-"
    assert str(SeriesId(Family.THEOREM2_9, q=10)) == "theorem2[q=10]"
    assert SeriesId(Family.PAIRED6, MINUS).constant == "ln4pi"


def test_base_term_examples():
    assert base_term(PLUS, 1, 64) == a_term(1, 64).value
    assert base_term(MINUS, 2, 64) == -a_term(2, 64).value
    for n in (1, 3, 5, 99):
        t = base_term(PLUS, n, 64)
        assert 0 < t.lo and t.hi < Fraction(1, n * (n + 1))


def test_base4_partial_sums_bracket_constants():
    for sign in (PLUS, MINUS):
        s = SeriesId(Family.BASE4, sign)
        for N in (1, 2, 7, 64, 500):
            report = evaluate_at(s, N)
            assert report.value.contains(target(s))


# --- cut alignment -----------------------------------------------------------

def test_alternating_cuts_only_after_pairs():
    for fam in (Family.VACCA3, Family.RATIONAL5):
        s = SeriesId(fam)
        assert is_valid_cut(s, 4) and not is_valid_cut(s, 5)
        with pytest.raises(UnalignedCut):
            tail_bound(s, 5)
        assert align_cut(s, 5) == 6 and cut_at(s, 3) == 6


def test_carlitz_cuts_after_residue_blocks():
    s = SeriesId(Family.CARLITZ10, q=3)
    assert [N for N in range(1, 15) if is_valid_cut(s, N)] == [2, 5, 8, 11, 14]
    with pytest.raises(UnalignedCut):
        tail_bound(s, 3)
    with pytest.raises(ValueError):  # UnalignedCut is also a ValueError
        tail_bound(s, 4)


# --- tail bounds ---------------------------------------------------------------

@pytest.mark.parametrize("series", RATIONAL_SERIES, ids=ident)
def test_tail_bound_covers_true_remainder(series):
    for m in (1, 2, 3, 7, 31, 100, 257):
        N = cut_at(series, m)
        remainder = abs(target(series) - partial_sum(series, N))
        assert remainder <= tail_bound(series, N) + ORACLE_SLACK, N


@pytest.mark.parametrize("series", RATIONAL_SERIES, ids=ident)
def test_tail_bound_nonincreasing(series):
    bounds = [tail_bound(series, cut_at(series, m)) for m in range(1, 400)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))


@pytest.mark.parametrize("k", range(1, 11))
@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_paired_bound_against_longer_partial_sum(k, sign):
    s = SeriesId(Family.PAIRED6, sign)
    N = 2 ** k - 1
    assert abs(partial_sum(s, 4 * N) - partial_sum(s, N)) <= tail_bound(s, N)


def test_base4_bounds():
    assert tail_bound(SeriesId(Family.BASE4, PLUS), 9) == Fraction(1, 10)
    s = SeriesId(Family.BASE4, MINUS)
    for N in (1, 2, 10, 300):
        assert a_term(N + 1).value.hi <= tail_bound(s, N) <= Fraction(1, (N + 1) ** 2)


def test_theorem2_q2_bound_equals_addison():
    for N in (1, 5, 100, 12345):
        assert tail_bound(SeriesId(Family.THEOREM2_9, q=2), N) == tail_bound(SeriesId(Family.ADDISON7), N)


def test_paired_plus_partial_sums_strictly_increase():
    s = SeriesId(Family.PAIRED6, PLUS)
    assert all(t > 0 for t in terms(s, 5000))
    sums = [partial_sum(s, N) for N in range(1, 200)]
    assert all(a < b for a, b in zip(sums, sums[1:]))
    assert sums[-1] < GAMMA


@pytest.mark.parametrize("series", RATIONAL_SERIES, ids=ident)
def test_tail_sign_matches_term_signs(series):
    side = tail_sign(series)
    signs = {(t > 0) - (t < 0) for t in terms(series, 3000)} - {0}
    if side:
        assert signs == {side}
        assert (target(series) - partial_sum(series, 100)) * side > 0
    else:
        assert signs == {1, -1}


def test_alternating_base4_tail_side():
    s = SeriesId(Family.BASE4, MINUS)
    for N in range(1, 40):
        side = tail_sign(s, N)
        partial = partial_sum(s, N)
        assert side == (1 if N % 2 == 0 else -1)
        assert (LN4PI - partial.mid) * side > 0
        assert evaluate_at(s, N).value.contains(LN4PI)
    assert tail_sign(s) == 0


def test_grouped_last_converges_to_gamma():
    for q in (2, 3, 5, 10):
        report = evaluate(SeriesId(Family.GROUPED_LAST18, q=q), Fraction(1, 10 ** 3))
        assert report.value.contains(GAMMA)


@given(st.sampled_from(RATIONAL_SERIES), st.integers(min_value=1, max_value=60),
       st.integers(min_value=1, max_value=60))
@settings(max_examples=60, deadline=None)
def test_partial_sums_split_additively(series, a, b):
    start = series.family.start
    head = partial_sum(series, a)
    rest = sum(terms(series, b, first=start + a), Fraction(0))
    assert head + rest == partial_sum(series, a + b)


# --- evaluate --------------------------------------------------------------------

@pytest.mark.parametrize("series", [
    SeriesId(Family.PAIRED6, PLUS), SeriesId(Family.PAIRED6, MINUS), SeriesId(Family.VACCA3),
    SeriesId(Family.RATIONAL5, MINUS), SeriesId(Family.ADDISON7),
    SeriesId(Family.THEOREM2_9, q=3), SeriesId(Family.CARLITZ10, q=2),
    SeriesId(Family.CARLITZ10, q=5), SeriesId(Family.GROUPED_FIRST17, q=4),
    SeriesId(Family.BASE4, PLUS), SeriesId(Family.BASE4, MINUS),
], ids=ident)
def test_evaluate_meets_target_and_contains_constant(series):
    tgt = Fraction(1, 1000)
    report = evaluate(series, tgt)
    assert isinstance(report, EvalReport)
    assert report.certified_error <= tgt
    assert report.value.contains(target(series))
    assert is_valid_cut(series, report.terms_used)
    # the previous valid cut does not certify the target
    m = 1
    while cut_at(series, m) < report.terms_used:
        m += 1
    if m > 1:
        assert evaluate_at(series, cut_at(series, m - 1)).certified_error > tgt


def test_evaluate_exact_partial_contained():
    s = SeriesId(Family.PAIRED6, PLUS)
    exact = evaluate_at(s, 50, exact=True)
    fast = evaluate_at(s, 50)
    assert exact.partial == partial_sum(s, 50)
    assert fast.partial.contains(exact.partial)
    assert exact.value.lo <= exact.partial <= exact.value.hi


def test_evaluate_paired_minus_example():
    report = evaluate(SeriesId(Family.PAIRED6, MINUS), Fraction(1, 10 ** 4))
    assert report.value.contains(Fraction("0.2415644752"))


def test_evaluate_base4_plus_half():
    s = SeriesId(Family.BASE4, PLUS)
    assert tail_bound(s, 1) == Fraction(1, 2)
    assert abs(a_term(1).value.mid - Fraction("0.3068528194400547")) < Fraction(1, 10 ** 15)
    # At N = 1 the tail alone uses the whole allowance, so rounding width pushes
    # the certified error past 1/2 and the first certifiable cut is N = 2.
    assert evaluate_at(s, 1).certified_error > Fraction(1, 2)
    report = evaluate(s, Fraction(1, 2))
    assert report.terms_used == 2 and report.certified_error <= Fraction(1, 2)


def test_evaluate_errors():
    with pytest.raises(BudgetExhausted) as info:
        evaluate(SeriesId(Family.PAIRED6, PLUS), Fraction(1, 10 ** 8), budget=1000)
    assert info.value.terms == 1000 and info.value.best_error > Fraction(1, 10 ** 8)
    with pytest.raises(PrecisionUnreachable):
        evaluate(SeriesId(Family.ADDISON7), Fraction(1, 2 ** 40), precision_bits=16)
    with pytest.raises(ValueError):
        evaluate(SeriesId(Family.ADDISON7), 0)


def test_chunked_rational_sum_is_order_independent():
    s = SeriesId(Family.CARLITZ10, q=3)
    ts = list(terms(s, 300))
    assert sum(ts[150:], Fraction(0)) + sum(ts[:150], Fraction(0)) == partial_sum(s, 300)
