"""Command line front end: ``compute``, ``verify``, ``bench`` and ``seq``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 precision unreachable or term budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import bench, verification
from .digits import SEQUENCE_KINDS, Sign, sequence
from .errors import BudgetExhausted, PrecisionUnreachable, UnalignedCut
from .numerics import DEFAULT_PRECISION, MIN_PRECISION, Enclosure, agreed_prefix, decimal_render, radius_text
from .series import DEFAULT_BUDGET, EvalReport, Family, SeriesId, evaluate, evaluate_at

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_UNREACHABLE = 0, 1, 2, 3
PRECISION_ENV = "VACCA_PRECISION_BITS"
METHODS = tuple(f.value for f in Family)
DEFAULT_TARGET = "1e-8"
DEFAULT_BENCH_SERIES = ("paired6", "addison", "theorem2:2", "theorem2:3", "theorem2:5", "theorem2:10")


@dataclass
class CliConfig:
    command: str
    constant: str = "gamma"
    method: str = "theorem2"
    q: int | None = None
    terms: int | None = None
    target_error: Fraction | None = None
    precision_bits: int = DEFAULT_PRECISION
    format: str = "text"
    out: str | None = None
    digits: int | None = None
    budget: int = DEFAULT_BUDGET
    suites: list[str] = field(default_factory=list)
    quick: bool = False
    series: list[SeriesId] = field(default_factory=list)
    checkpoints: list[int] = field(default_factory=list)
    kind: str = "delta-minus"
    count: int = 0

    def series_id(self) -> SeriesId:
        sign = Sign.PLUS if self.constant == "gamma" else Sign.MINUS
        return SeriesId(Family(self.method), sign, self.q or 2)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return value


def _positive_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _series_token(text: str) -> SeriesId:
    """``name``, ``name-`` for the ln(4/pi) analog, or ``name:q``."""
    name, _, q = text.partition(":")
    sign = Sign.PLUS
    if name.endswith("-") or name.endswith("+"):
        sign = Sign.MINUS if name.endswith("-") else Sign.PLUS
        name = name[:-1]
    try:
        return SeriesId(Family(name), sign, int(q) if q else 2)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad series {text!r}: {exc}")


def _default_precision(parser: argparse.ArgumentParser) -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        parser.error(f"{PRECISION_ENV} must be an integer, got {raw!r}")
    if bits < MIN_PRECISION:
        parser.error(f"{PRECISION_ENV} must be >= {MIN_PRECISION}")
    return bits


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vacca", description="Vacca-type rational series for gamma and ln(4/pi).")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="evaluate a constant with a certified enclosure")
    compute.add_argument("--constant", choices=("gamma", "ln4pi"), default="gamma")
    compute.add_argument("--method", choices=METHODS, default="theorem2")
    compute.add_argument("--q", type=int, help="base for theorem2, carlitz, grouped17, grouped18")
    stop = compute.add_mutually_exclusive_group()
    stop.add_argument("--terms", type=_positive_int, help="sum exactly this many terms")
    stop.add_argument("--target-error", type=_positive_fraction,
                      help=f"certified error to reach (default {DEFAULT_TARGET})")
    compute.add_argument("--precision-bits", type=_positive_int)
    compute.add_argument("--digits", type=_positive_int, help="require this many certified decimals")
    compute.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)
    compute.add_argument("--format", choices=("text", "json"), default="text")

    verify = sub.add_parser("verify", help="run the lemma and identity suites")
    verify.add_argument("--suite", action="append", choices=("all",) + verification.SUITES,
                        help="suite to run (repeatable, default all)")
    verify.add_argument("--quick", action="store_true", help="reduced ranges")
    verify.add_argument("--precision-bits", type=_positive_int)
    verify.add_argument("--format", choices=("text", "json"), default="text")

    bench_p = sub.add_parser("bench", help="certified error versus number of terms")
    bench_p.add_argument("--series", action="append", type=_series_token,
                         help="series as name, name- (ln(4/pi)) or name:q (repeatable)")
    bench_p.add_argument("--checkpoints", default=",".join(map(str, bench.DEFAULT_CHECKPOINTS)))
    bench_p.add_argument("--precision-bits", type=_positive_int)
    bench_p.add_argument("--format", choices=("csv", "json"), default="csv")
    bench_p.add_argument("--out", help="output file (default standard output)")

    seq = sub.add_parser("seq", help="print an integer sequence from n = 1")
    seq.add_argument("--kind", choices=SEQUENCE_KINDS, required=True)
    seq.add_argument("--count", type=_nonneg_int, required=True)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> CliConfig:
    """Parse and validate; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = CliConfig(ns.command)
    default_bits = _default_precision(parser)

    if ns.command == "compute":
        cfg.constant, cfg.method, cfg.q = ns.constant, ns.method, ns.q
        cfg.terms, cfg.digits, cfg.budget, cfg.format = ns.terms, ns.digits, ns.budget, ns.format
        cfg.precision_bits = ns.precision_bits or default_bits
        family = Family(cfg.method)
        if cfg.constant == "ln4pi" and not family.has_minus:
            parser.error(f"--constant ln4pi needs base4, rational5 or paired6, not {cfg.method}")
        if cfg.q is not None and not family.has_q:
            parser.error(f"--q is not accepted by {cfg.method}")
        if cfg.q is not None and cfg.q < 2:
            parser.error("--q must be >= 2")
        if cfg.terms is None:
            cfg.target_error = ns.target_error or Fraction(DEFAULT_TARGET)
    elif ns.command == "verify":
        cfg.suites = [] if not ns.suite or "all" in ns.suite else ns.suite
        cfg.quick, cfg.format = ns.quick, ns.format
        cfg.precision_bits = ns.precision_bits or verification.LEMMA_PRECISION
    elif ns.command == "bench":
        cfg.series = ns.series or [_series_token(t) for t in DEFAULT_BENCH_SERIES]
        try:
            cfg.checkpoints = sorted(_positive_int(t) for t in ns.checkpoints.split(","))
        except argparse.ArgumentTypeError as exc:
            parser.error(f"--checkpoints: {exc}")
        cfg.precision_bits = ns.precision_bits or default_bits
        cfg.format, cfg.out = ns.format, ns.out
    else:
        cfg.kind, cfg.count = ns.kind, ns.count
    if cfg.precision_bits < MIN_PRECISION:
        parser.error(f"--precision-bits must be >= {MIN_PRECISION}")
    return cfg


def _value_text(value: Enclosure, digits: int | None) -> str:
    if digits is not None:
        return decimal_render(value, digits)
    prefix = agreed_prefix(value)
    return f"{prefix or '?'} (± {radius_text(value)})"


def _report_json(report: EvalReport, value_text: str) -> dict:
    partial = report.partial
    return {
        "constant": report.series.constant,
        "method": report.series.family.value,
        "sign": report.series.sign.value,
        "q": report.series.q,
        "terms_used": report.terms_used,
        "partial": str(partial) if isinstance(partial, Fraction) else {"lo": str(partial.lo), "hi": str(partial.hi)},
        "tail_bound": str(report.tail),
        "certified_error": bench.format_upper(report.certified_error),
        "value": value_text,
        "lo": str(report.value.lo),
        "hi": str(report.value.hi),
        "elapsed_s": round(report.elapsed, 6),
    }


def _run_compute(cfg: CliConfig) -> int:
    series = cfg.series_id()
    try:
        if cfg.terms is not None:
            report = evaluate_at(series, cfg.terms, cfg.precision_bits, exact=series.family.is_rational)
        else:
            report = evaluate(series, cfg.target_error, cfg.precision_bits, cfg.budget)
        value_text = _value_text(report.value, cfg.digits)
    except UnalignedCut as exc:
        print(f"vacca: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"vacca: budget exhausted: {exc} (best certified error {float(exc.best_error):.3e} "
              f"at {exc.terms} terms)", file=sys.stderr)
        return EXIT_UNREACHABLE
    except PrecisionUnreachable as exc:
        print(f"vacca: precision unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE

    if cfg.format == "json":
        print(json.dumps(_report_json(report, value_text), indent=2, ensure_ascii=False))
        return EXIT_OK
    print(f"series:          {series} -> {series.constant}")
    print(f"terms:           {report.terms_used}")
    if isinstance(report.partial, Fraction):
        print(f"partial:         {report.partial}")
        print(f"partial decimal: {decimal_render(report.partial, 30)}")
    print(f"tail bound:      {bench.format_upper(report.tail)}")
    print(f"certified error: {bench.format_upper(report.certified_error)}")
    print(f"value:           {value_text}")
    print(f"enclosure:       [{decimal_render(report.value.lo, 30)}, {decimal_render(report.value.hi, 30)}]")
    return EXIT_OK


def _run_verify(cfg: CliConfig) -> int:
    config = verification.VerifyConfig.quick() if cfg.quick else verification.VerifyConfig()
    config.precision_bits = cfg.precision_bits
    reports = verification.run_all(config, cfg.suites or None)
    if cfg.format == "json":
        print(json.dumps([{
            "suite": r.suite,
            "cases_checked": r.cases_checked,
            "max_residual": str(r.max_residual),
            "passed": r.passed,
            "witnesses": [list(w) if isinstance(w, tuple) else w for w in r.witnesses],
        } for r in reports], indent=2))
    else:
        for r in reports:
            print(r.summary())
        ok = sum(r.passed for r in reports)
        print(f"{ok}/{len(reports)} suites passed")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def _run_bench(cfg: CliConfig) -> int:
    records = bench.run_convergence(cfg.series, cfg.checkpoints, cfg.precision_bits)
    bench.emit(records, cfg.format, cfg.out)
    return EXIT_OK


def run(cfg: CliConfig) -> int:
    if cfg.command == "compute":
        return _run_compute(cfg)
    if cfg.command == "verify":
        return _run_verify(cfg)
    if cfg.command == "bench":
        return _run_bench(cfg)
    print(" ".join(str(v) for v in sequence(cfg.kind, cfg.count)))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", line_buffering=True)
    logging.basicConfig(level=os.environ.get("VACCA_LOG", "WARNING"), format="%(message)s")
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
