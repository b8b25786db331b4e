"""Certified error versus term count, per series and base.

"Converges faster" is measured as a smaller certified error at the same
number of terms; wall time is recorded but never compared.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .acceleration import shape_ratio
from .digits import Sign, floor_log
from .errors import VaccaError
from .numerics import DEFAULT_PRECISION, agreed_prefix, power_of_ten_above
from .series import DEFAULT_BUDGET, Family, SeriesId, align_cut, evaluate_at

COLUMNS = ("series", "sign", "q", "n_terms", "value_prefix", "certified_error", "elapsed_ns")
DEFAULT_CHECKPOINTS = (10 ** 2, 10 ** 3, 10 ** 4)
BUDGET_EXHAUSTED = "budget-exhausted"


def format_upper(x: Fraction, sig: int = 12) -> str:
    """Scientific notation with ``sig`` significant digits, rounded up."""
    if x == 0:
        return "0"
    if x < 0:
        raise ValueError("error bounds are nonnegative")
    e = power_of_ten_above(x) - 1  # 10**e < x <= 10**(e+1)
    unit = Fraction(10) ** (e - sig + 1)
    scaled = x / unit
    mant = -(-scaled.numerator // scaled.denominator)
    if mant >= 10 ** sig:
        mant //= 10  # exact power of ten; rounding up cannot overshoot it
        e += 1
    digits = str(mant)
    return f"{digits[0]}.{digits[1:]}e{e:+03d}"


@dataclass(frozen=True)
class ConvergenceRecord:
    series: SeriesId
    n_terms: int
    certified_error: str
    value_prefix: str
    elapsed_ns: int

    def as_row(self) -> dict:
        return {
            "series": self.series.family.value,
            "sign": self.series.sign.value,
            "q": self.series.q,
            "n_terms": self.n_terms,
            "value_prefix": self.value_prefix,
            "certified_error": self.certified_error,
            "elapsed_ns": self.elapsed_ns,
        }

    @classmethod
    def from_row(cls, row: dict) -> "ConvergenceRecord":
        series = SeriesId(Family(row["series"]), Sign(row["sign"]), int(row["q"]))
        return cls(series, int(row["n_terms"]), str(row["certified_error"]),
                   str(row["value_prefix"]), int(row["elapsed_ns"]))


def run_convergence(series_list: Sequence[SeriesId], checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS,
                    precision_bits: int = DEFAULT_PRECISION,
                    budget: int = DEFAULT_BUDGET) -> list[ConvergenceRecord]:
    """One record per (series, checkpoint), ordered by series then ``N``.

    Checkpoints are moved up to the next certifiable cut for series that can
    only be truncated after complete sign pairs or residue blocks.
    """
    if list(checkpoints) != sorted(checkpoints):
        raise ValueError("checkpoints must be ascending")
    records = []
    for series in series_list:
        seen = set()
        for N in checkpoints:
            cut = align_cut(series, N)
            if cut in seen:
                continue
            seen.add(cut)
            if cut > budget:
                records.append(ConvergenceRecord(series, cut, BUDGET_EXHAUSTED, "", 0))
                continue
            started = time.perf_counter_ns()
            try:
                report = evaluate_at(series, cut, precision_bits)
            except VaccaError as exc:
                records.append(ConvergenceRecord(series, cut, f"error: {exc}", "", 0))
                continue
            elapsed = time.perf_counter_ns() - started
            records.append(ConvergenceRecord(series, cut, format_upper(report.certified_error),
                                             agreed_prefix(report.value), elapsed))
    return records


@dataclass(frozen=True)
class ProbeTable:
    q: int
    rows: tuple[tuple[int, Fraction], ...]

    def max_deviation_by_decade(self) -> dict[int, Fraction]:
        """``max |ratio - 1|`` keyed by ``floor(log10 n)``."""
        out: dict[int, Fraction] = {}
        for n, ratio in self.rows:
            d = floor_log(n, 10)
            out[d] = max(out.get(d, Fraction(0)), abs(ratio - 1))
        return out


def leading_constant_probe(q: int, n_samples: Iterable[int]) -> ProbeTable:
    return ProbeTable(q, tuple((n, shape_ratio(q, n)) for n in n_samples))


def _dump(records: Sequence[ConvergenceRecord], fmt: str) -> str:
    rows = [r.as_row() for r in records]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(records: Sequence[ConvergenceRecord], fmt: str = "csv",
         destination: Union[str, Path, IO[str], None] = None) -> None:
    """Write records as CSV or JSON to a path, an open text stream, or stdout."""
    text = _dump(records, fmt)
    if destination is None:
        sys.stdout.write(text)
    elif isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def load_records(text: str, fmt: str) -> list[ConvergenceRecord]:
    if fmt == "json":
        rows = json.loads(text)
    elif fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return [ConvergenceRecord.from_row(r) for r in rows]
