import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from vacca import cli, verification
from vacca.digits import Sign
from vacca.series import Family, SeriesId


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_examples():
    cfg = cli.parse_args(["compute", "--constant", "gamma", "--method", "theorem2", "--q", "10",
                          "--target-error", "1e-10"])
    assert cfg.series_id() == SeriesId(Family.THEOREM2_9, q=10)
    assert cfg.target_error == Fraction(1, 10 ** 10)
    assert cli.parse_args(["seq", "--kind", "delta-minus", "--count", "8"]).count == 8


@pytest.mark.parametrize("argv", [
    ["compute", "--constant", "ln4pi", "--method", "addison"],
    ["compute", "--method", "paired6", "--q", "3"],
    ["compute", "--method", "theorem2", "--q", "1"],
    ["compute", "--terms", "3", "--target-error", "1e-3"],
    ["compute", "--terms", "0"],
    ["compute", "--target-error", "-1"],
    ["compute", "--precision-bits", "8"],
    ["compute", "--bogus"],
    ["seq", "--kind", "primes", "--count", "3"],
    ["seq", "--kind", "delta-plus", "--count", "-1"],
    ["bench", "--series", "addison-"],
    ["bench", "--checkpoints", "10,x"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_env_precision(monkeypatch, capsys):
    monkeypatch.setenv("VACCA_PRECISION_BITS", "80")
    assert cli.parse_args(["compute"]).precision_bits == 80
    monkeypatch.setenv("VACCA_PRECISION_BITS", "lots")
    assert run(capsys, "compute")[0] == 2


def test_seq(capsys):
    code, out, _ = run(capsys, "seq", "--kind", "delta-minus", "--count", "8")
    assert code == 0 and out == "1 0 2 -1 1 1 3 -2\n"


def test_compute_terms_text(capsys):
    code, out, _ = run(capsys, "compute", "--constant", "gamma", "--method", "paired6",
                       "--terms", "3", "--format", "text")
    assert code == 0
    assert "partial:         11/35" in out
    assert "0.314285714285714285714285714286" in out


def test_compute_json_schema(capsys):
    code, out, _ = run(capsys, "compute", "--method", "theorem2", "--q", "5", "--target-error", "1e-6",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"constant", "method", "sign", "q", "terms_used", "partial", "tail_bound",
                         "certified_error", "value", "lo", "hi", "elapsed_s"}
    assert Fraction(data["lo"]) <= Fraction("0.5772156649") <= Fraction(data["hi"])
    assert data["value"].startswith("0.57721")
    assert Fraction(data["certified_error"]) <= Fraction(1, 10 ** 6)


def test_compute_ln4pi(capsys):
    code, out, _ = run(capsys, "compute", "--constant", "ln4pi", "--method", "paired6",
                       "--target-error", "1e-3", "--digits", "2")
    assert code == 0 and "value:           0.24 (± 1e-" in out


def test_compute_unaligned_cut_is_usage_error(capsys):
    code, _, err = run(capsys, "compute", "--method", "rational5", "--terms", "3")
    assert code == 2 and "cannot be certified" in err


def test_compute_exit_3(capsys):
    code, _, err = run(capsys, "compute", "--method", "paired6", "--target-error", "1e-9", "--budget", "100")
    assert code == 3 and "budget exhausted" in err
    code, _, err = run(capsys, "compute", "--method", "theorem2", "--target-error", "1e-3", "--digits", "12")
    assert code == 3 and "precision unreachable" in err


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--suite", "pairing", "--suite", "lemma2")
    assert code == 0
    assert out.splitlines()[-1] == "2/2 suites passed"


def test_verify_json_and_failure_exit(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--quick", "--suite", "two-m-minus-q", "--format", "json")
    assert code == 0 and json.loads(out)[0]["passed"] is True

    def failing(config, suites):
        r = verification.LemmaReport("averaged-identity")
        r.record(False, (4, 1), 1)
        return [r]

    monkeypatch.setattr(verification, "run_all", failing)
    code, out, _ = run(capsys, "verify")
    assert code == 1 and "[FAIL] averaged-identity" in out


def test_bench_csv_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--series", "paired6-", "--series", "theorem2:3",
                       "--checkpoints", "10,100")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 5 and lines[1].startswith("paired6,minus,2,10,")
    path = tmp_path / "b.json"
    code, out, _ = run(capsys, "bench", "--series", "addison", "--checkpoints", "10", "--format", "json",
                       "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())[0]["series"] == "addison"


def test_series_token_parsing():
    assert cli._series_token("rational5-") == SeriesId(Family.RATIONAL5, Sign.MINUS)
    assert cli._series_token("grouped18:7") == SeriesId(Family.GROUPED_LAST18, q=7)


def test_module_entry_point_utf8():
    env = dict(os.environ, PYTHONIOENCODING="ascii")
    proc = subprocess.run([sys.executable, "-m", "vacca", "compute", "--method", "addison",
                           "--target-error", "1e-4"], capture_output=True, env=env)
    assert proc.returncode == 0
    assert "±".encode("utf-8") in proc.stdout
