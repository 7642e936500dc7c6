import csv
import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from ladder.cli import main
from ladder.errors import UnknownFormat
from ladder.verifier import (CSV_HEADER, INDETERMINATE_CUP, MATCH, MISMATCH, VerificationReport,
                             VerifyOptions, cache_path, cached_verify, compare, emit_report,
                             load_cached, parse_reports, scan_verify, verify_pair)


@pytest.fixture(scope="module")
def report_37():
    return verify_pair(37, 32)


def test_compare_examples():
    assert compare([[1, 2, 3]], [2, 4, 6], 7) == (MATCH, 4)  # E = 4 w
    assert compare([[1, 2, 3]], [2, 4, 5], 7) == (MISMATCH, None)
    assert compare([[1, 2, 3]], [0, 0, 0], 7) == (MISMATCH, None)
    assert compare([], [1, 2, 3], 7)[0] == INDETERMINATE_CUP
    assert compare([[1, 0], [0, 1]], [1, 2], 7)[0] == INDETERMINATE_CUP


@settings(max_examples=50)
@given(st.lists(st.integers(0, 100), min_size=1, max_size=6), st.integers(1, 100), st.integers(1, 100))
def test_compare_projective(w, a, b):
    p = 101
    w = [x % p for x in w]
    if not any(w):
        return
    e = [a * x % p for x in w]
    status, lam = compare([e], [b * x % p for x in w], p)
    assert status == MATCH
    assert lam * b % p == a


def test_verify_single_pair(report_37):
    r = report_37
    assert r.status == MATCH
    assert (r.dim_solution, r.dim_E) == (1, 1)
    assert r.ms["dim_S_plus"] == 2 and r.ms["dim_M_plus"] == 3
    assert len(r.w) == len(r.E_basis[0]) == 14
    lam = r.lambda_
    assert [lam * x % 37 for x in r.w] == r.E_basis[0]


def test_verify_691_matches_delta():
    r = verify_pair(691, 12)
    assert r.status == MATCH
    assert r.w == [1, 641, 50, 690]


def test_emit_empty():
    assert emit_report([], "json") == b"[]"


def test_json_round_trip(report_37):
    data = emit_report([report_37], "json")
    back = parse_reports(data)
    assert back[0].to_dict() == report_37.to_dict()
    assert "timings" not in json.loads(emit_report([report_37], "json", timings=False))[0]


def test_csv_header(report_37):
    rows = list(csv.reader(io.StringIO(emit_report([report_37], "csv").decode())))
    assert rows[0] == CSV_HEADER
    assert rows[1][:3] == ["37", "32", MATCH]
    assert len(rows[1][6].split(";")) == 14


def test_unknown_format(report_37):
    with pytest.raises(UnknownFormat):
        emit_report([report_37], "xml")


def test_cache_hit_and_options(tmp_path):
    first = cached_verify(37, 32, cache=tmp_path)
    path = cache_path(tmp_path, 37, 32)
    assert path.exists()
    assert not list(path.parent.glob("*.tmp"))
    assert load_cached(tmp_path, 37, 32, VerifyOptions()).to_dict() == first.to_dict()
    assert load_cached(tmp_path, 37, 32, VerifyOptions(min_prime=20)) is None
    stale = json.loads(path.read_text())
    stale["version"] = "0.0.0"
    path.write_text(json.dumps(stale))
    assert load_cached(tmp_path, 37, 32, VerifyOptions()) is None


def test_cache_ignores_corrupt_file(tmp_path):
    path = cache_path(tmp_path, 37, 32)
    path.parent.mkdir(parents=True)
    path.write_text("{not json")
    assert cached_verify(37, 32, cache=tmp_path).status == MATCH
    assert json.loads(path.read_text())["status"] == MATCH


def test_scan_verify_bounds():
    assert scan_verify(36) == []
    reports = scan_verify(37)
    assert [(r.p, r.k) for r in reports] == [(37, 32)]


def test_steinberg_only_is_indeterminate():
    r = verify_pair(37, 32, VerifyOptions(steinberg_only=True))
    assert r.dim_solution > 1
    assert r.cup["dim_steinberg_a_only"] >= r.cup["dim_steinberg"] == r.dim_solution


def test_cli_scan(capsysbinary):
    assert main(["scan", "--pmax", "40"]) == 0
    assert json.loads(capsysbinary.readouterr().out) == [{"p": 37, "k": 32}]
    assert main(["scan", "--pmax", "40", "--format", "csv"]) == 0
    assert capsysbinary.readouterr().out.decode().split() == ["p,k", "37,32"]


def test_cli_verify(capsysbinary):
    assert main(["verify", "-p", "37", "-k", "32", "--no-timings"]) == 0
    out = json.loads(capsysbinary.readouterr().out)
    assert out[0]["status"] == MATCH and "timings" not in out[0]


def test_cli_not_irregular_exit_code(capsys):
    assert main(["verify", "-p", "11", "-k", "12"]) == 2
    assert "NotIrregular" in capsys.readouterr().err


def test_cli_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "ladder.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ladder" in proc.stdout
